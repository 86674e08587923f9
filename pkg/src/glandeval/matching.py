"""Object correspondence between a truth map and a predicted map.

The overlap table is the exact pixelwise contingency between the two object
sets. Each object's partner is the opposite-set object with maximal overlap
(ties broken by lowest partner label); objects with no overlap at all have no
partner. For boundary distances, unmatched objects fall back to the nearest
opposite-set object in the same image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .distance import hausdorff_points
from .errors import NoCounterpartError, ShapeError
from .grid import LabelMap, ObjectRecord
from . import _kernels


@dataclass(frozen=True)
class OverlapTable:
    """Sparse contingency of pixel overlaps between two object sets.

    ``entries[(i, j)]`` counts pixels carrying truth label i and predicted
    label j; zero overlaps are absent. Areas are full object sizes (the
    marginals over object pixels), ``total_pixels`` the image size.
    """

    n_gt: int
    n_seg: int
    entries: Mapping[tuple[int, int], int]
    gt_areas: Mapping[int, int]
    seg_areas: Mapping[int, int]
    total_pixels: int


@dataclass(frozen=True)
class Correspondence:
    """Maximal-overlap partner maps; ``None`` stands for the empty object.

    ``gt_partner[j]`` is the truth object with the largest overlap with
    predicted object j; ``seg_partner[i]`` the predicted object with the
    largest overlap with truth object i.
    """

    gt_partner: Mapping[int, Optional[int]]
    seg_partner: Mapping[int, Optional[int]]


def overlap_table(gt: LabelMap, seg: LabelMap) -> OverlapTable:
    """Exact pixelwise overlap contingency between two label maps."""
    if gt.shape != seg.shape:
        raise ShapeError(
            f"truth map is {gt.shape[0]}x{gt.shape[1]} but prediction is "
            f"{seg.shape[0]}x{seg.shape[1]}"
        )
    gi, sj, counts = _kernels.overlap_counts(gt.labels, seg.labels)
    entries = {
        (int(a), int(b)): int(c) for a, b, c in zip(gi, sj, counts)
    }
    return OverlapTable(
        n_gt=gt.n_objects,
        n_seg=seg.n_objects,
        entries=entries,
        gt_areas={lab: rec.area for lab, rec in gt.objects.items()},
        seg_areas={lab: rec.area for lab, rec in seg.objects.items()},
        total_pixels=gt.height * gt.width,
    )


def maximal_overlap(table: OverlapTable) -> Correspondence:
    """Pick each object's maximal-overlap partner from the table.

    Ties are broken by the lowest partner label so results are reproducible.
    """
    best_for_seg: dict[int, tuple[int, int]] = {}
    best_for_gt: dict[int, tuple[int, int]] = {}
    for (i, j), count in sorted(table.entries.items()):
        cur = best_for_seg.get(j)
        if cur is None or count > cur[0]:
            best_for_seg[j] = (count, i)
        cur = best_for_gt.get(i)
        if cur is None or count > cur[0]:
            best_for_gt[i] = (count, j)
    gt_partner = {j: None for j in table.seg_areas}
    gt_partner.update({j: i for j, (_, i) in best_for_seg.items()})
    seg_partner = {i: None for i in table.gt_areas}
    seg_partner.update({i: j for i, (_, j) in best_for_gt.items()})
    return Correspondence(gt_partner=gt_partner, seg_partner=seg_partner)


def hausdorff_fallback(
    obj: ObjectRecord,
    candidates: Mapping[int, ObjectRecord],
    mode: str = "boundary",
) -> ObjectRecord:
    """Nearest opposite-set object by Hausdorff distance.

    Used for objects without an overlap partner. Ties resolve to the lowest
    candidate label; an empty candidate set raises :class:`NoCounterpartError`.
    """
    if not candidates:
        raise NoCounterpartError(
            f"object {obj.label} has no counterpart candidates in its image"
        )
    if mode == "boundary":
        own = obj._map.object_boundary_points(obj.label)
    else:
        own = obj._map.object_points(obj.label)
    best = None
    best_dist = None
    for label in sorted(candidates):
        cand = candidates[label]
        if mode == "boundary":
            pts = cand._map.object_boundary_points(label)
        else:
            pts = cand._map.object_points(label)
        d = hausdorff_points(own, pts)
        if best_dist is None or d < best_dist:
            best, best_dist = cand, d
    return best
