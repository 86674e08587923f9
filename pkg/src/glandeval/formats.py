"""File formats: label images, manifests, score tables, reports.

Label images are single-channel PNGs (8- or 16-bit gray, or palette files
whose palette index is the label) or whitespace-separated text grids; the
pixel value is the object id and 0 is background. Score tables are CSV with
``metric/part`` column headers and a ``direction`` annotation row. Reports
serialize to JSON or CSV with full-precision numbers plus 3-decimal display
values; the timestamp is the only non-reproducible field.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from . import __version__
from .errors import FormatError, ValidationError
from .grid import LabelMap
from .metrics import EvalConfig, MetricReport
from .ranking import Leaderboard, ScoreColumn, ScoreTable

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_GRAY_MODES = {"1", "L", "I", "I;16", "I;16B", "I;16L", "I;16N", "P"}


# ---------------------------------------------------------------------------
# label images


def load_label_image(path) -> LabelMap:
    """Load a label map from PNG or a plain-text integer grid."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(8)
    if head.startswith(_PNG_MAGIC):
        return _load_label_png(path)
    return _load_label_text(path)


def _load_label_png(path: Path) -> LabelMap:
    with Image.open(path) as img:
        if img.mode not in _GRAY_MODES:
            raise FormatError(
                f"{path}: {img.mode} PNG is not a label image; convert to "
                "single-channel gray (pixel value = object id) first"
            )
        arr = np.asarray(img)
    if arr.ndim != 2:
        raise FormatError(f"{path}: expected a single channel, got shape {arr.shape}")
    return LabelMap(arr.astype(np.int64))


def _load_label_text(path: Path) -> LabelMap:
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: not an integer grid: {exc}") from exc
    if not rows:
        raise FormatError(f"{path}: empty label grid")
    return LabelMap(rows)


def save_label_image(label_map: LabelMap, path) -> None:
    """Write a label map as a 16-bit grayscale PNG."""
    path = Path(path)
    labels = label_map.labels
    top = int(labels.max())
    if top > np.iinfo(np.uint16).max:
        raise ValueError(f"label {top} does not fit 16-bit PNG")
    Image.fromarray(labels.astype(np.uint16)).save(path, format="PNG")


def save_label_text(label_map: LabelMap, path) -> None:
    """Write a label map as a whitespace-separated integer grid."""
    Path(path).write_text(
        "\n".join(" ".join(str(int(v)) for v in row) for row in label_map.labels) + "\n"
    )


def save_gray_image(image: np.ndarray, path) -> None:
    """Write a uint8 grayscale intensity image (synthetic corpora)."""
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="L").save(path, format="PNG")


def load_gray_image(path) -> np.ndarray:
    """Load a single-channel intensity image for the segmenter."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(8)
    if head.startswith(_PNG_MAGIC):
        with Image.open(path) as img:
            if img.mode not in _GRAY_MODES:
                raise FormatError(
                    f"{path}: segmenter input must be single-channel, got {img.mode}"
                )
            return np.asarray(img)
    return _load_label_text(path).labels


# ---------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class ManifestRecord:
    image_id: str
    truth: Path
    prediction: Path


@dataclass(frozen=True)
class EvalManifest:
    records: tuple[ManifestRecord, ...]
    part: Optional[str] = None
    pixel_size_um: Optional[float] = None


def load_manifest(path) -> EvalManifest:
    """Load and validate a JSON evaluation manifest.

    Relative image paths resolve against the manifest's directory; ids must
    be unique and every referenced file must exist.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "images" not in doc:
        raise ValidationError(f"{path}: manifest must be an object with an 'images' list")
    base = path.parent
    records = []
    seen: set[str] = set()
    for k, item in enumerate(doc["images"]):
        missing = {"id", "truth", "prediction"} - set(item)
        if missing:
            raise ValidationError(
                f"{path}: images[{k}] is missing field(s) {sorted(missing)}"
            )
        image_id = str(item["id"])
        if image_id in seen:
            raise ValidationError(f"{path}: duplicate image id {image_id!r}")
        seen.add(image_id)
        truth = (base / item["truth"]).resolve()
        prediction = (base / item["prediction"]).resolve()
        for p in (truth, prediction):
            if not p.is_file():
                raise ValidationError(f"{path}: file not found for {image_id!r}: {p}")
        records.append(ManifestRecord(image_id, truth, prediction))
    return EvalManifest(
        records=tuple(records),
        part=doc.get("part"),
        pixel_size_um=doc.get("pixel_size_um"),
    )


def save_manifest(manifest: EvalManifest, path) -> None:
    doc = {
        "part": manifest.part,
        "pixel_size_um": manifest.pixel_size_um,
        "images": [
            {"id": r.image_id, "truth": str(r.truth), "prediction": str(r.prediction)}
            for r in manifest.records
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# score tables


def load_scores(path) -> ScoreTable:
    """Load a CSV score table.

    Layout: header row ``entry,metric/part,...``, then a ``direction`` row
    with ``higher``/``lower`` per column, then one row per entry.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 3:
        raise ValidationError(f"{path}: need a header, a direction row, and entries")
    header = rows[0]
    columns_raw = header[1:]
    if not columns_raw:
        raise ValidationError(f"{path}: no score columns")
    direction_row = rows[1]
    if direction_row[0].strip().lower() != "direction":
        raise ValidationError(f"{path}: second row must be the 'direction' row")
    if len(direction_row) != len(header):
        raise ValidationError(f"{path}: direction row width does not match header")
    columns = []
    for name, direction in zip(columns_raw, direction_row[1:]):
        name = name.strip()
        if "/" not in name:
            raise ValidationError(
                f"{path}: column {name!r} is not in 'metric/part' form"
            )
        metric, part = name.rsplit("/", 1)
        direction = direction.strip().lower()
        alias = {"higher": "higher-better", "lower": "lower-better"}
        if direction in alias:
            direction = alias[direction]
        columns.append(ScoreColumn(metric=metric, part=part, direction=direction))
    entries = []
    values = []
    for row in rows[2:]:
        if len(row) != len(header):
            raise ValidationError(
                f"{path}: entry {row[0]!r} has {len(row) - 1} cells, expected "
                f"{len(columns_raw)}"
            )
        entries.append(row[0].strip())
        parsed = []
        for col, cell in zip(columns, row[1:]):
            cell = cell.strip()
            if not cell:
                raise ValidationError(
                    f"{path}: entry {row[0]!r} is missing a score for {col.key}"
                )
            try:
                parsed.append(float(cell))
            except ValueError as exc:
                raise ValidationError(
                    f"{path}: entry {row[0]!r}, column {col.key}: {exc}"
                ) from exc
        values.append(parsed)
    return ScoreTable(
        entries=tuple(entries), columns=tuple(columns), values=np.array(values)
    )


def bundled_contest_scores() -> Path:
    """Path of the packaged 10-entry contest score table."""
    return Path(__file__).parent / "data" / "contest_scores.csv"


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ReportDocument:
    """Serializable evaluation report; config echo makes reruns reproducible."""

    tool_name: str
    tool_version: str
    timestamp: str
    config: dict
    pooled: dict
    per_image: tuple[dict, ...]


_METRIC_FIELDS = (
    "f1",
    "precision",
    "recall",
    "dice_pixel",
    "dice_obj",
    "hausdorff_obj",
    "ari",
)


def _metric_row(m) -> dict:
    row: dict = {}
    for name in _METRIC_FIELDS:
        row[name] = getattr(m, name)
    row["display"] = {name: f"{getattr(m, name):.3f}" for name in _METRIC_FIELDS}
    row["tp"] = m.counts.tp
    row["fp"] = m.counts.fp
    row["fn"] = m.counts.fn
    return row


def build_report(
    report: MetricReport,
    config: EvalConfig,
    part: Optional[str] = None,
    timestamp: Optional[str] = None,
) -> ReportDocument:
    """Assemble a report document from pooled metrics and their config."""
    cfg_echo = {
        "tp_threshold": config.tp_threshold,
        "hausdorff_mode": config.hausdorff_mode,
        "ari_policy": config.ari_policy,
        "connectivity": config.connectivity,
        "split_components": config.split_components,
        "pixel_size_um": config.pixel_size_um,
        "part": part,
    }
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    per_image = []
    for m in report.per_image:
        row = {"id": m.image_id}
        row.update(_metric_row(m))
        per_image.append(row)
    return ReportDocument(
        tool_name="glandeval",
        tool_version=__version__,
        timestamp=timestamp,
        config=cfg_echo,
        pooled=_metric_row(report),
        per_image=tuple(per_image),
    )


def write_report(doc: ReportDocument, path, fmt: str = "json") -> None:
    """Serialize a report with deterministic field ordering."""
    path = Path(path)
    if fmt == "json":
        payload = {
            "tool": {"name": doc.tool_name, "version": doc.tool_version},
            "timestamp": doc.timestamp,
            "config": doc.config,
            "pooled": doc.pooled,
            "per_image": list(doc.per_image),
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["# tool", doc.tool_name, doc.tool_version])
    writer.writerow(["# timestamp", doc.timestamp])
    writer.writerow(["# config", json.dumps(doc.config)])
    header = (
        ["id"]
        + list(_METRIC_FIELDS)
        + [f"{name}_3dp" for name in _METRIC_FIELDS]
        + ["tp", "fp", "fn"]
    )
    writer.writerow(header)

    def emit(name: str, row: dict) -> None:
        writer.writerow(
            [name]
            + [repr(row[f]) for f in _METRIC_FIELDS]
            + [row["display"][f] for f in _METRIC_FIELDS]
            + [row["tp"], row["fp"], row["fn"]]
        )

    for row in doc.per_image:
        emit(row["id"], row)
    emit("POOLED", doc.pooled)
    path.write_text(buf.getvalue())


def write_leaderboard(board: Leaderboard, path, fmt: str = "json") -> None:
    """Serialize a leaderboard (final order, per-column ranks, rank sums)."""
    path = Path(path)
    index = {name: k for k, name in enumerate(board.entries)}
    if fmt == "json":
        payload = {
            "columns": [c.key for c in board.columns],
            "final_order": list(board.final_order),
            "tied_rank_sums": [list(g) for g in board.tied_groups],
            "entries": [
                {
                    "name": name,
                    "rank_sum": board.rank_sums[index[name]],
                    "ranks": {
                        c.key: int(board.per_column_ranks[index[name], k])
                        for k, c in enumerate(board.columns)
                    },
                }
                for name in board.final_order
            ],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown leaderboard format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["entry"] + [c.key for c in board.columns] + ["rank_sum"])
    for name in board.final_order:
        i = index[name]
        writer.writerow(
            [name]
            + [int(r) for r in board.per_column_ranks[i]]
            + [board.rank_sums[i]]
        )
    path.write_text(buf.getvalue())
