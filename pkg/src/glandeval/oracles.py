"""Brute-force reference implementations for cross-checking the metrics.

Everything here works on raw numpy label grids and deliberately shares no
helpers with the rest of the package: contingencies come from double loops
over masks, Hausdorff distances from all-pairs scans, the adjusted Rand
index from literal pair counting, and the object-level scores from a
straight-line expansion of their defining sums. Feasible only on small
inputs; that is the point.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist


def flood_components(mask, connectivity: int = 8) -> np.ndarray:
    """Connected components by breadth-first flood fill."""
    m = np.asarray(mask) != 0
    h, w = m.shape
    if connectivity == 4:
        steps = ((-1, 0), (1, 0), (0, -1), (0, 1))
    else:
        steps = tuple(
            (dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)
        )
    out = np.zeros((h, w), dtype=np.int32)
    nxt = 0
    for r0 in range(h):
        for c0 in range(w):
            if not m[r0, c0] or out[r0, c0]:
                continue
            nxt += 1
            queue = [(r0, c0)]
            out[r0, c0] = nxt
            while queue:
                r, c = queue.pop()
                for dr, dc in steps:
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < h and 0 <= cc < w and m[rr, cc] and not out[rr, cc]:
                        out[rr, cc] = nxt
                        queue.append((rr, cc))
    return out


def neighbor_boundary(labels) -> np.ndarray:
    """Inner boundary by per-pixel 4-neighbor inspection."""
    lab = np.asarray(labels)
    h, w = lab.shape
    out = np.zeros((h, w), dtype=bool)
    for r in range(h):
        for c in range(w):
            v = lab[r, c]
            if v <= 0:
                continue
            if r == 0 or r == h - 1 or c == 0 or c == w - 1:
                out[r, c] = True
                continue
            if (
                lab[r - 1, c] != v
                or lab[r + 1, c] != v
                or lab[r, c - 1] != v
                or lab[r, c + 1] != v
            ):
                out[r, c] = True
    return out


def allpairs_hausdorff(a_mask, b_mask, mode: str = "boundary") -> float:
    """Hausdorff distance by exhaustive all-pairs comparison.

    The |a| x |b| squared-distance matrix is materialized outright (exact in
    float64 for grid coordinates) and reduced with sup-inf both ways.
    """
    a = np.asarray(a_mask) != 0
    b = np.asarray(b_mask) != 0
    if mode == "boundary":
        a = neighbor_boundary(a.astype(np.int32))
        b = neighbor_boundary(b.astype(np.int32))
    pa = np.argwhere(a).astype(np.float64)
    pb = np.argwhere(b).astype(np.float64)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise ValueError("empty pixel set")
    sq = cdist(pa, pb, metric="sqeuclidean")
    return math.sqrt(max(sq.min(axis=1).max(), sq.min(axis=0).max()))


def paircount_ari(gt, seg, policy: str = "include") -> float:
    """Adjusted Rand index by counting agreement over all pixel pairs.

    Every unordered pixel pair is classified as same/different cluster in
    each partition; under ``exclude`` a background pixel belongs to no
    cluster, under ``include`` background is a cluster in each partition.
    """
    g = np.asarray(gt).ravel().astype(np.int64)
    s = np.asarray(seg).ravel().astype(np.int64)
    n = g.size
    if n < 2:
        raise ValueError("need at least 2 pixels")
    same_g = g[:, None] == g[None, :]
    same_s = s[:, None] == s[None, :]
    if policy == "exclude":
        same_g &= (g > 0)[:, None] & (g > 0)[None, :]
        same_s &= (s > 0)[:, None] & (s > 0)[None, :]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    both = int((same_g & same_s & upper).sum())
    in_g = int((same_g & upper).sum())
    in_s = int((same_s & upper).sum())
    total = n * (n - 1) // 2
    # exact integers, single float division (numerator and denominator are
    # the pair counts scaled by 2*total)
    numerator = 2 * total * both - 2 * in_g * in_s
    denominator = total * (in_g + in_s) - 2 * in_g * in_s
    if denominator == 0:
        return 1.0
    return numerator / denominator


def _object_masks(labels) -> dict[int, np.ndarray]:
    lab = np.asarray(labels)
    return {int(v): lab == v for v in np.unique(lab) if v > 0}


def _argmax_partner(mask: np.ndarray, others: dict[int, np.ndarray]):
    """Opposite object with maximal overlap, lowest label on ties."""
    best_label, best_count = None, 0
    for lab in sorted(others):
        count = int((mask & others[lab]).sum())
        if count > best_count:
            best_label, best_count = lab, count
    return best_label


def expanded_object_dice(pairs) -> float:
    """Pooled object-level Dice by direct expansion of its defining sum."""
    gt_masks_all, seg_masks_all = [], []
    for gt, seg in pairs:
        gt_masks_all.append(_object_masks(gt))
        seg_masks_all.append(_object_masks(seg))
    total_gt = sum(int(m.sum()) for d in gt_masks_all for m in d.values())
    total_seg = sum(int(m.sum()) for d in seg_masks_all for m in d.values())
    if total_gt == 0 and total_seg == 0:
        return 1.0
    first = 0.0
    for gt_masks, seg_masks in zip(gt_masks_all, seg_masks_all):
        for lab in sorted(gt_masks):
            mask = gt_masks[lab]
            partner = _argmax_partner(mask, seg_masks)
            if partner is None:
                d = 0.0
            else:
                other = seg_masks[partner]
                d = 2.0 * int((mask & other).sum()) / (int(mask.sum()) + int(other.sum()))
            first += (int(mask.sum()) / total_gt) * d if total_gt else 0.0
    second = 0.0
    for gt_masks, seg_masks in zip(gt_masks_all, seg_masks_all):
        for lab in sorted(seg_masks):
            mask = seg_masks[lab]
            partner = _argmax_partner(mask, gt_masks)
            if partner is None:
                d = 0.0
            else:
                other = gt_masks[partner]
                d = 2.0 * int((mask & other).sum()) / (int(mask.sum()) + int(other.sum()))
            second += (int(mask.sum()) / total_seg) * d if total_seg else 0.0
    return 0.5 * (first + second)


def expanded_object_hausdorff(pairs, mode: str = "boundary") -> float:
    """Pooled object-level Hausdorff by direct expansion of its sum.

    Unmatched objects use the nearest opposite object of the same image by
    exhaustive search; an image with an empty opposite set contributes the
    image diagonal for each of its objects.
    """
    per_image = []
    for gt, seg in pairs:
        g = np.asarray(gt)
        per_image.append(
            (
                _object_masks(g),
                _object_masks(seg),
                math.sqrt(g.shape[0] ** 2 + g.shape[1] ** 2),
            )
        )
    total_gt = sum(int(m.sum()) for gm, _, _ in per_image for m in gm.values())
    total_seg = sum(int(m.sum()) for _, sm, _ in per_image for m in sm.values())
    if total_gt == 0 and total_seg == 0:
        return 0.0

    def nearest(mask, others):
        return min(allpairs_hausdorff(mask, others[lab], mode) for lab in sorted(others))

    first = 0.0
    second = 0.0
    for gt_masks, seg_masks, diagonal in per_image:
        for lab in sorted(gt_masks):
            mask = gt_masks[lab]
            partner = _argmax_partner(mask, seg_masks)
            if partner is not None:
                d = allpairs_hausdorff(mask, seg_masks[partner], mode)
            elif seg_masks:
                d = nearest(mask, seg_masks)
            else:
                d = diagonal
            first += (int(mask.sum()) / total_gt) * d if total_gt else 0.0
        for lab in sorted(seg_masks):
            mask = seg_masks[lab]
            partner = _argmax_partner(mask, gt_masks)
            if partner is not None:
                d = allpairs_hausdorff(gt_masks[partner], mask, mode)
            elif gt_masks:
                d = nearest(mask, gt_masks)
            else:
                d = diagonal
            second += (int(mask.sum()) / total_seg) * d if total_seg else 0.0
    return 0.5 * (first + second)


def enumerate_detections(gt, seg, threshold: float = 0.5):
    """(tp, fp, fn) by re-deriving the claim order from scratch."""
    gt_masks = _object_masks(gt)
    seg_masks = _object_masks(seg)
    overlaps = {}
    partners = {}
    for j in sorted(seg_masks):
        partner = _argmax_partner(seg_masks[j], gt_masks)
        partners[j] = partner
        overlaps[j] = (
            int((seg_masks[j] & gt_masks[partner]).sum()) if partner is not None else 0
        )
    claimed = set()
    tp = 0
    for j in sorted(seg_masks, key=lambda j: (-overlaps[j], j)):
        partner = partners[j]
        if partner is None or partner in claimed:
            continue
        if overlaps[j] >= threshold * int(gt_masks[partner].sum()):
            claimed.add(partner)
            tp += 1
    return tp, len(seg_masks) - tp, len(gt_masks) - tp
