"""Evaluation measures for object-level segmentation.

Detection F1 under the 50%-overlap true-positive rule, pixel and object-level
Dice, adjusted Rand index, and object-level Hausdorff distance, each per
image and pooled over a dataset. Pooling follows the challenge convention:
detection counts are summed, object-level scores are re-weighted over the
union of all objects from all images, and the adjusted Rand index treats
images as disjoint pixel domains.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .distance import HAUSDORFF_MODES, hausdorff, hausdorff_points
from .errors import EvaluationError, ShapeError, UndefinedInputError
from .grid import LabelMap, split_components
from .matching import Correspondence, OverlapTable, maximal_overlap, overlap_table

ARI_POLICIES = ("include", "exclude")

__all__ = [
    "ARI_POLICIES",
    "DetectionCounts",
    "EvalConfig",
    "F1Score",
    "ImageMetrics",
    "MetricReport",
    "adjusted_rand",
    "detection_counts",
    "dice",
    "evaluate",
    "f1",
    "hausdorff",
    "object_dice",
    "object_hausdorff",
    "pooled_object_dice",
    "pooled_object_hausdorff",
]


@dataclass(frozen=True)
class DetectionCounts:
    """True-positive / false-positive / false-negative object counts."""

    tp: int
    fp: int
    fn: int

    def __add__(self, other: "DetectionCounts") -> "DetectionCounts":
        return DetectionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


class F1Score(NamedTuple):
    f1: float
    precision: float
    recall: float


@dataclass(frozen=True)
class EvalConfig:
    """Switches of the evaluation protocol.

    ``tp_threshold`` is the fraction of a truth object that a predicted
    object must cover to count as a detection. ``hausdorff_mode`` picks the
    pixels entering boundary distances; ``ari_policy`` controls whether the
    background is appended as one extra cluster to each partition.
    ``pixel_size_um`` is reporting metadata only; distances stay in pixels.
    """

    tp_threshold: float = 0.5
    hausdorff_mode: str = "boundary"
    ari_policy: str = "include"
    connectivity: int = 8
    split_components: bool = False
    jobs: int = 1
    pixel_size_um: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.tp_threshold <= 1.0:
            raise ValueError("tp_threshold must be in (0, 1]")
        if self.hausdorff_mode not in HAUSDORFF_MODES:
            raise ValueError(f"hausdorff_mode must be one of {HAUSDORFF_MODES}")
        if self.ari_policy not in ARI_POLICIES:
            raise ValueError(f"ari_policy must be one of {ARI_POLICIES}")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class ImageMetrics:
    image_id: str
    counts: DetectionCounts
    f1: float
    precision: float
    recall: float
    dice_pixel: float
    dice_obj: float
    hausdorff_obj: float
    ari: float


@dataclass(frozen=True)
class MetricReport:
    """Dataset-pooled metrics plus the per-image breakdown."""

    counts: DetectionCounts
    f1: float
    precision: float
    recall: float
    dice_pixel: float
    dice_obj: float
    hausdorff_obj: float
    ari: float
    per_image: tuple[ImageMetrics, ...] = ()


def detection_counts(
    table: OverlapTable, corr: Correspondence, threshold: float = 0.5
) -> DetectionCounts:
    """Count detections under the coverage rule.

    A predicted object is a true positive iff its maximal-overlap truth
    partner is covered by at least ``threshold`` of that partner's area and
    the partner is not already claimed. Predictions are processed in
    descending partner overlap (ties by label), so each truth object is
    claimed at most once and FN = n_truth - TP can never go negative.
    """

    def partner_overlap(j: int) -> int:
        i = corr.gt_partner[j]
        return table.entries[(i, j)] if i is not None else 0

    claimed: set[int] = set()
    tp = 0
    for j in sorted(table.seg_areas, key=lambda j: (-partner_overlap(j), j)):
        i = corr.gt_partner[j]
        if i is None:
            continue
        if i not in claimed and table.entries[(i, j)] >= threshold * table.gt_areas[i]:
            claimed.add(i)
            tp += 1
    return DetectionCounts(tp=tp, fp=table.n_seg - tp, fn=table.n_gt - tp)


def f1(counts: DetectionCounts) -> F1Score:
    """F1 with precision and recall; empty-vs-empty scores 1 by convention."""
    if counts.tp == 0 and counts.fp == 0 and counts.fn == 0:
        return F1Score(1.0, 1.0, 1.0)
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    value = (
        2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    )
    return F1Score(value, precision, recall)


def dice(a, b) -> float:
    """Dice index of two pixel sets (boolean masks or coordinate sets).

    Two empty sets score 1 by convention.
    """
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        if a.shape != b.shape:
            raise ShapeError("dice masks must have identical shape")
        inter = int(np.logical_and(a, b).sum())
        size = int(np.count_nonzero(a)) + int(np.count_nonzero(b))
    else:
        sa, sb = set(map(tuple, a)), set(map(tuple, b))
        inter = len(sa & sb)
        size = len(sa) + len(sb)
    return 2.0 * inter / size if size else 1.0


# ---------------------------------------------------------------------------
# object-level Dice


def _dice_terms(table: OverlapTable, corr: Correspondence):
    """Area-weighted per-object Dice sums for both directions.

    Returns (truth_weighted_sum, truth_area, pred_weighted_sum, pred_area);
    an object whose partner is the empty object contributes Dice 0.
    """
    gt_terms = []
    for i in sorted(table.gt_areas):
        j = corr.seg_partner[i]
        if j is not None:
            n_ij = table.entries[(i, j)]
            d = 2.0 * n_ij / (table.gt_areas[i] + table.seg_areas[j])
            gt_terms.append(table.gt_areas[i] * d)
    seg_terms = []
    for j in sorted(table.seg_areas):
        i = corr.gt_partner[j]
        if i is not None:
            n_ij = table.entries[(i, j)]
            d = 2.0 * n_ij / (table.gt_areas[i] + table.seg_areas[j])
            seg_terms.append(table.seg_areas[j] * d)
    # fsum: correctly rounded, so the value does not depend on label order
    return (
        math.fsum(gt_terms),
        sum(table.gt_areas.values()),
        math.fsum(seg_terms),
        sum(table.seg_areas.values()),
    )


def _combine_objectwise(terms, empty_value: float) -> float:
    gt_sum = sum(t[0] for t in terms)
    gt_area = sum(t[1] for t in terms)
    seg_sum = sum(t[2] for t in terms)
    seg_area = sum(t[3] for t in terms)
    if gt_area == 0 and seg_area == 0:
        return empty_value
    first = gt_sum / gt_area if gt_area else 0.0
    second = seg_sum / seg_area if seg_area else 0.0
    return 0.5 * (first + second)


def object_dice(gt: LabelMap, seg: LabelMap) -> float:
    """Object-level Dice of one image pair.

    Symmetric area-weighted sum of per-object Dice indices against each
    object's maximal-overlap partner; 1 if both maps are empty.
    """
    return pooled_object_dice([(gt, seg)])


def pooled_object_dice(pairs: Sequence[tuple[LabelMap, LabelMap]]) -> float:
    """Object-level Dice pooled over images with globally normalized weights."""
    terms = []
    for gt, seg in pairs:
        table = overlap_table(gt, seg)
        terms.append(_dice_terms(table, maximal_overlap(table)))
    return _combine_objectwise(terms, empty_value=1.0)


# ---------------------------------------------------------------------------
# object-level Hausdorff


class _PairwiseHausdorff:
    """Memoized pairwise Hausdorff distances between two maps' objects."""

    def __init__(self, gt: LabelMap, seg: LabelMap, mode: str):
        self.gt = gt
        self.seg = seg
        self.mode = mode
        self._memo: dict[tuple[int, int], float] = {}

    def _points(self, m: LabelMap, label: int) -> np.ndarray:
        if self.mode == "boundary":
            return m.object_boundary_points(label)
        return m.object_points(label)

    def between(self, i: int, j: int) -> float:
        key = (i, j)
        d = self._memo.get(key)
        if d is None:
            d = hausdorff_points(self._points(self.gt, i), self._points(self.seg, j))
            self._memo[key] = d
        return d

    def nearest_seg(self, i: int) -> float:
        return min(self.between(i, j) for j in sorted(self.seg.objects))

    def nearest_gt(self, j: int) -> float:
        return min(self.between(i, j) for i in sorted(self.gt.objects))


def _hausdorff_terms(gt: LabelMap, seg: LabelMap, corr: Correspondence, mode: str):
    """Area-weighted per-object Hausdorff sums for both directions.

    Unmatched objects use the nearest opposite object in the same image; if
    the opposite set is empty, the image diagonal is the defined penalty.
    """
    engine = _PairwiseHausdorff(gt, seg, mode)
    diagonal = math.sqrt(gt.width**2 + gt.height**2)
    gt_terms = []
    for i, rec in sorted(gt.objects.items()):
        j = corr.seg_partner[i]
        if j is not None:
            d = engine.between(i, j)
        elif seg.n_objects:
            d = engine.nearest_seg(i)
        else:
            d = diagonal
        gt_terms.append(rec.area * d)
    seg_terms = []
    for j, rec in sorted(seg.objects.items()):
        i = corr.gt_partner[j]
        if i is not None:
            d = engine.between(i, j)
        elif gt.n_objects:
            d = engine.nearest_gt(j)
        else:
            d = diagonal
        seg_terms.append(rec.area * d)
    gt_area = sum(r.area for r in gt.objects.values())
    seg_area = sum(r.area for r in seg.objects.values())
    return math.fsum(gt_terms), gt_area, math.fsum(seg_terms), seg_area


def object_hausdorff(gt: LabelMap, seg: LabelMap, mode: str = "boundary") -> float:
    """Object-level Hausdorff distance of one image pair (pixels)."""
    return pooled_object_hausdorff([(gt, seg)], mode=mode)


def pooled_object_hausdorff(
    pairs: Sequence[tuple[LabelMap, LabelMap]], mode: str = "boundary"
) -> float:
    """Object-level Hausdorff pooled over images with global weights."""
    if mode not in HAUSDORFF_MODES:
        raise ValueError(f"mode must be one of {HAUSDORFF_MODES}, got {mode!r}")
    terms = []
    for gt, seg in pairs:
        table = overlap_table(gt, seg)  # validates shapes
        corr = maximal_overlap(table)
        terms.append(_hausdorff_terms(gt, seg, corr, mode))
    return _combine_objectwise(terms, empty_value=0.0)


# ---------------------------------------------------------------------------
# adjusted Rand index


@dataclass(frozen=True)
class _AriParts:
    """Exact integer tallies of one image's contingency table."""

    cell_obj: int  # sum of C(n_ij, 2) over object-object cells
    cell_gtbg: int  # sum over cells (truth background, predicted object)
    cell_segbg: int  # sum over cells (truth object, predicted background)
    bg_bg: int  # pixels background in both maps
    marg_gt: int  # sum of C(object area, 2), truth side
    marg_seg: int  # prediction side
    gt_area: int
    seg_area: int
    n: int


def _ari_parts(table: OverlapTable) -> _AriParts:
    row_sums: dict[int, int] = {i: 0 for i in table.gt_areas}
    col_sums: dict[int, int] = {j: 0 for j in table.seg_areas}
    cell_obj = 0
    inter = 0
    for (i, j), c in table.entries.items():
        cell_obj += comb(c, 2)
        row_sums[i] += c
        col_sums[j] += c
        inter += c
    cell_segbg = sum(comb(table.gt_areas[i] - row_sums[i], 2) for i in table.gt_areas)
    cell_gtbg = sum(comb(table.seg_areas[j] - col_sums[j], 2) for j in table.seg_areas)
    gt_area = sum(table.gt_areas.values())
    seg_area = sum(table.seg_areas.values())
    return _AriParts(
        cell_obj=cell_obj,
        cell_gtbg=cell_gtbg,
        cell_segbg=cell_segbg,
        bg_bg=table.total_pixels - gt_area - seg_area + inter,
        marg_gt=sum(comb(a, 2) for a in table.gt_areas.values()),
        marg_seg=sum(comb(a, 2) for a in table.seg_areas.values()),
        gt_area=gt_area,
        seg_area=seg_area,
        n=table.total_pixels,
    )


def _assemble_ari(parts: Sequence[_AriParts], policy: str) -> float:
    if policy not in ARI_POLICIES:
        raise ValueError(f"background_policy must be one of {ARI_POLICIES}")
    n = sum(p.n for p in parts)
    if n < 2:
        raise UndefinedInputError("adjusted Rand index needs at least 2 pixels")
    same_both = sum(p.cell_obj for p in parts)
    same_gt = sum(p.marg_gt for p in parts)
    same_seg = sum(p.marg_seg for p in parts)
    if policy == "include":
        # one global background cluster per partition
        same_both += sum(p.cell_gtbg + p.cell_segbg for p in parts)
        same_both += comb(sum(p.bg_bg for p in parts), 2)
        same_gt += comb(n - sum(p.gt_area for p in parts), 2)
        same_seg += comb(n - sum(p.seg_area for p in parts), 2)
    total = comb(n, 2)
    # exact integer arithmetic; one float division at the end
    numerator = 2 * total * same_both - 2 * same_gt * same_seg
    denominator = total * (same_gt + same_seg) - 2 * same_gt * same_seg
    if denominator == 0:
        # both partitions trivial in the same way; degenerate perfect agreement
        return 1.0
    return numerator / denominator


def adjusted_rand(table: OverlapTable, background_policy: str = "include") -> float:
    """Adjusted Rand index between the two pixel partitions of one image.

    Under ``include`` (default) the background is appended as one extra
    cluster to each partition so that all pixels are covered; ``exclude``
    uses the object clusters only, keeping all-pixel pair normalization.
    """
    return _assemble_ari([_ari_parts(table)], background_policy)


# ---------------------------------------------------------------------------
# dataset evaluation


@dataclass(frozen=True)
class _ImagePartial:
    metrics: ImageMetrics
    counts: DetectionCounts
    intersection: int
    dice_terms: tuple[float, int, float, int]
    hausdorff_terms: tuple[float, int, float, int]
    ari_parts: _AriParts


def _evaluate_image(image_id: str, gt: LabelMap, seg: LabelMap, cfg: EvalConfig) -> _ImagePartial:
    if cfg.split_components:
        gt = split_components(gt, cfg.connectivity)
        seg = split_components(seg, cfg.connectivity)
    table = overlap_table(gt, seg)
    corr = maximal_overlap(table)
    counts = detection_counts(table, corr, cfg.tp_threshold)
    d_terms = _dice_terms(table, corr)
    h_terms = _hausdorff_terms(gt, seg, corr, cfg.hausdorff_mode)
    parts = _ari_parts(table)
    intersection = sum(table.entries.values())
    area_sum = d_terms[1] + d_terms[3]
    score = f1(counts)
    metrics = ImageMetrics(
        image_id=image_id,
        counts=counts,
        f1=score.f1,
        precision=score.precision,
        recall=score.recall,
        dice_pixel=2.0 * intersection / area_sum if area_sum else 1.0,
        dice_obj=_combine_objectwise([d_terms], empty_value=1.0),
        hausdorff_obj=_combine_objectwise([h_terms], empty_value=0.0),
        ari=_assemble_ari([parts], cfg.ari_policy),
    )
    return _ImagePartial(metrics, counts, intersection, d_terms, h_terms, parts)


def evaluate(
    pairs: Sequence[tuple[LabelMap, LabelMap]],
    config: EvalConfig | None = None,
    ids: Sequence[str] | None = None,
) -> MetricReport:
    """Evaluate truth/prediction pairs and pool over the dataset.

    Per-image work runs on up to ``config.jobs`` threads; the pooled
    reduction is an ordered fold over the input order, so results do not
    depend on the degree of parallelism.
    """
    cfg = config or EvalConfig()
    pairs = list(pairs)
    if not pairs:
        raise ValueError("evaluate needs at least one image pair")
    if ids is None:
        ids = [str(k) for k in range(len(pairs))]
    elif len(ids) != len(pairs):
        raise ValueError("ids and pairs must have equal length")

    def run_one(arg):
        image_id, (gt, seg) = arg
        try:
            return _evaluate_image(image_id, gt, seg, cfg)
        except Exception as exc:
            raise EvaluationError(f"image {image_id!r}: {exc}") from exc

    work = list(zip(ids, pairs))
    if cfg.jobs > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            partials = list(pool.map(run_one, work))
    else:
        partials = [run_one(w) for w in work]

    counts = DetectionCounts(0, 0, 0)
    for p in partials:
        counts = counts + p.counts
    score = f1(counts)
    intersection = sum(p.intersection for p in partials)
    gt_area = sum(p.dice_terms[1] for p in partials)
    seg_area = sum(p.dice_terms[3] for p in partials)
    area_sum = gt_area + seg_area
    return MetricReport(
        counts=counts,
        f1=score.f1,
        precision=score.precision,
        recall=score.recall,
        dice_pixel=2.0 * intersection / area_sum if area_sum else 1.0,
        dice_obj=_combine_objectwise([p.dice_terms for p in partials], empty_value=1.0),
        hausdorff_obj=_combine_objectwise(
            [p.hausdorff_terms for p in partials], empty_value=0.0
        ),
        ari=_assemble_ari([p.ari_parts for p in partials], cfg.ari_policy),
        per_image=tuple(p.metrics for p in partials),
    )
