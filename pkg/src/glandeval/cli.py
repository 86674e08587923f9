"""Command-line interface.

Subcommands: ``evaluate`` (manifest of truth/prediction label images ->
report), ``rank`` (score table -> leaderboard), ``segment`` (grayscale image
-> label image), ``synth`` (synthetic gland corpus), ``oracle`` (brute-force
cross-checks of the fast metric paths).

Exit codes: 0 success, 2 validation/format error, 3 computation error.
Errors are emitted as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, baseline, formats, metrics, oracles, ranking
from ._kernels import BACKEND
from .distance import hausdorff
from .errors import (
    FormatError,
    InvalidScoreError,
    ShapeError,
    ValidationError,
)
from .grid import LabelMap
from .matching import overlap_table

_VALIDATION_ERRORS = (
    FormatError,
    InvalidScoreError,
    ShapeError,
    ValidationError,
    ValueError,
    FileNotFoundError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glandeval",
        description="Object-level segmentation evaluation, ranking, and baseline tools.",
    )
    parser.add_argument("--version", action="version", version=f"glandeval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="evaluate a manifest of image pairs")
    p_eval.add_argument("--manifest", required=True, type=Path)
    p_eval.add_argument("--out", required=True, type=Path)
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")
    p_eval.add_argument("--hausdorff", choices=("boundary", "full"), default="boundary")
    p_eval.add_argument("--ari", choices=("include", "exclude"), default="include")
    p_eval.add_argument("--tp-threshold", type=float, default=0.5)
    p_eval.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p_eval.add_argument(
        "--split-components",
        action="store_true",
        help="re-componentize loaded maps so each connected region is one object",
    )
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument(
        "--timestamp", help="override the report timestamp (reproducible output)"
    )

    p_rank = sub.add_parser("rank", help="rank a score table into a leaderboard")
    p_rank.add_argument("--scores", required=True, type=Path)
    p_rank.add_argument("--out", required=True, type=Path)
    p_rank.add_argument("--format", choices=("json", "csv"), default="json")

    p_seg = sub.add_parser("segment", help="run the region-growing baseline")
    p_seg.add_argument("--image", required=True, type=Path)
    p_seg.add_argument("--config", type=Path, help="JSON file of segmenter settings")
    p_seg.add_argument("--out", required=True, type=Path)

    p_synth = sub.add_parser("synth", help="generate a synthetic gland corpus")
    p_synth.add_argument("--spec", required=True, type=Path)
    p_synth.add_argument("--out-dir", required=True, type=Path)

    p_oracle = sub.add_parser("oracle", help="cross-check fast paths against brute force")
    p_oracle.add_argument(
        "--suite", required=True, choices=("hausdorff", "ari", "objdice")
    )
    p_oracle.add_argument("--trials", type=int, default=25)
    p_oracle.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_evaluate(args) -> int:
    manifest = formats.load_manifest(args.manifest)
    config = metrics.EvalConfig(
        tp_threshold=args.tp_threshold,
        hausdorff_mode=args.hausdorff,
        ari_policy=args.ari,
        connectivity=args.connectivity,
        split_components=args.split_components,
        jobs=args.jobs,
        pixel_size_um=manifest.pixel_size_um,
    )
    pairs = []
    ids = []
    for rec in manifest.records:
        pairs.append(
            (formats.load_label_image(rec.truth), formats.load_label_image(rec.prediction))
        )
        ids.append(rec.image_id)
    report = metrics.evaluate(pairs, config, ids=ids)
    doc = formats.build_report(
        report, config, part=manifest.part, timestamp=args.timestamp
    )
    formats.write_report(doc, args.out, fmt=args.format)
    print(f"evaluated {len(pairs)} image pair(s) -> {args.out}")
    return 0


def _cmd_rank(args) -> int:
    table = formats.load_scores(args.scores)
    board = ranking.rank_sum(table)
    formats.write_leaderboard(board, args.out, fmt=args.format)
    print(f"ranked {len(table.entries)} entries -> {args.out}")
    if board.tied_groups:
        print(f"note: tied rank sums: {['|'.join(g) for g in board.tied_groups]}")
    return 0


def _cmd_segment(args) -> int:
    image = formats.load_gray_image(args.image)
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        known = {f.name for f in dataclasses.fields(baseline.SegmenterConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValidationError(f"unknown segmenter settings: {sorted(unknown)}")
        config = baseline.SegmenterConfig(**raw)
    else:
        config = baseline.SegmenterConfig()
    result = baseline.segment_region_growing(image, config)
    formats.save_label_image(result, args.out)
    print(f"segmented {args.image} -> {args.out} ({result.n_objects} objects)")
    return 0


def _cmd_synth(args) -> int:
    raw = json.loads(Path(args.spec).read_text())
    count = int(raw.pop("images", 1))
    known = {f.name for f in dataclasses.fields(baseline.SynthSpec)}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown synth settings: {sorted(unknown)}")
    for key in ("radius", "ring_thickness"):
        if key in raw:
            raw[key] = tuple(raw[key])
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    base_seed = int(raw.pop("seed", 0))
    listing = []
    for k in range(count):
        spec = baseline.SynthSpec(seed=base_seed + k, **raw)
        image, truth = baseline.synth_glands(spec)
        image_name = f"image_{k:03d}.png"
        truth_name = f"truth_{k:03d}.png"
        formats.save_gray_image(image, out_dir / image_name)
        formats.save_label_image(truth, out_dir / truth_name)
        listing.append(
            {
                "id": f"synth_{k:03d}",
                "image": image_name,
                "truth": truth_name,
                "glands": truth.n_objects,
                "seed": spec.seed,
            }
        )
    (out_dir / "dataset.json").write_text(json.dumps({"images": listing}, indent=2) + "\n")
    print(f"wrote {count} synthetic image(s) to {out_dir}")
    return 0


def _cmd_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0
    print(f"suite={args.suite} trials={args.trials} backend={BACKEND}")
    for t in range(args.trials):
        if args.suite == "hausdorff":
            a = _random_blob(rng, 48)
            b = _random_blob(rng, 48)
            ok = all(
                abs(
                    hausdorff(a, b, mode)
                    - oracles.allpairs_hausdorff(a, b, mode)
                )
                <= 1e-9
                for mode in ("boundary", "full")
            )
        elif args.suite == "ari":
            gt, seg = _random_pair(rng, 24)
            table = overlap_table(LabelMap(gt), LabelMap(seg))
            ok = all(
                abs(
                    metrics.adjusted_rand(table, policy)
                    - oracles.paircount_ari(gt, seg, policy)
                )
                <= 1e-9
                for policy in ("include", "exclude")
            )
        else:  # objdice
            raw_pairs = [_random_pair(rng, 32) for _ in range(2)]
            pairs = [(LabelMap(g), LabelMap(s)) for g, s in raw_pairs]
            ok = (
                abs(
                    metrics.pooled_object_dice(pairs)
                    - oracles.expanded_object_dice(raw_pairs)
                )
                <= 1e-9
                and abs(
                    metrics.pooled_object_hausdorff(pairs)
                    - oracles.expanded_object_hausdorff(raw_pairs)
                )
                <= 1e-9
            )
        print(f"trial {t:3d}: {'PASS' if ok else 'FAIL'}")
        failures += 0 if ok else 1
    print(f"{args.trials - failures}/{args.trials} trials passed")
    return 0 if failures == 0 else 3


def _random_blob(rng: np.random.Generator, size: int) -> np.ndarray:
    """Random non-empty blob: a few dilated seed points."""
    h = int(rng.integers(4, size + 1))
    w = int(rng.integers(4, size + 1))
    mask = np.zeros((h, w), dtype=bool)
    for _ in range(int(rng.integers(1, 4))):
        r, c = int(rng.integers(h)), int(rng.integers(w))
        rad = int(rng.integers(1, max(2, min(h, w) // 3)))
        rr, cc = np.ogrid[:h, :w]
        mask |= (rr - r) ** 2 + (cc - c) ** 2 <= rad * rad
    return mask


def _random_pair(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Random truth/prediction label grids with a handful of objects."""
    h = int(rng.integers(6, size + 1))
    w = int(rng.integers(6, size + 1))

    def one() -> np.ndarray:
        lab = np.zeros((h, w), dtype=np.int32)
        for k in range(1, int(rng.integers(1, 5)) + 1):
            r, c = int(rng.integers(h)), int(rng.integers(w))
            rad = int(rng.integers(1, max(2, min(h, w) // 3)))
            rr, cc = np.ogrid[:h, :w]
            lab[((rr - r) ** 2 + (cc - c) ** 2 <= rad * rad) & (lab == 0)] = k
        return lab

    return one(), one()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "evaluate": _cmd_evaluate,
        "rank": _cmd_rank,
        "segment": _cmd_segment,
        "synth": _cmd_synth,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except _VALIDATION_ERRORS as exc:
        _emit_error(exc)
        return 2
    except Exception as exc:  # computation failure
        _emit_error(exc)
        return 3


def _emit_error(exc: Exception) -> None:
    print(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}),
        file=sys.stderr,
    )


if __name__ == "__main__":
    sys.exit(main())
