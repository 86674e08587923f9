"""Vectorized numpy/scipy implementations of the grid kernels.

Same contracts as the compiled ``_speedups`` extension; used when the
extension is unavailable or when ``GLANDEVAL_BACKEND=python`` is set.
"""

import numpy as np
from scipy import ndimage

_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)

_EMPTY_I64 = np.empty(0, dtype=np.int64)


def label_components(mask, connectivity=8):
    """Label connected foreground regions.

    Returns ``(labels, count)`` where labels run 1..count in raster order of
    each component's first pixel.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity!r}")
    m = np.asarray(mask) != 0
    if m.ndim != 2:
        raise ValueError("mask must be 2D")
    structure = _STRUCT_4 if connectivity == 4 else _STRUCT_8
    raw, count = ndimage.label(m, structure=structure)
    if count == 0:
        return np.zeros(m.shape, dtype=np.int32), 0
    # normalize to first-occurrence raster order
    values, first = np.unique(raw.ravel(), return_index=True)
    positive = values > 0
    order = np.argsort(first[positive], kind="stable")
    remap = np.zeros(count + 1, dtype=np.int32)
    remap[values[positive][order]] = np.arange(1, count + 1, dtype=np.int32)
    return remap[raw], count


def sq_edt(mask):
    """Exact squared Euclidean distance to the nearest True pixel (int64)."""
    m = np.asarray(mask) != 0
    if m.ndim != 2:
        raise ValueError("mask must be 2D")
    if not m.any():
        raise ValueError("sq_edt requires at least one foreground pixel")
    if m.all():
        return np.zeros(m.shape, dtype=np.int64)
    nearest = ndimage.distance_transform_edt(
        ~m, return_distances=False, return_indices=True
    )
    rr, cc = np.indices(m.shape)
    dr = nearest[0].astype(np.int64) - rr
    dc = nearest[1].astype(np.int64) - cc
    return dr * dr + dc * dc


def overlap_counts(gt, seg):
    """Sparse contingency of positive-label overlaps.

    Returns ``(gt_labels, seg_labels, counts)`` int64 arrays sorted
    lexicographically by (gt label, seg label); zero overlaps are absent.
    """
    g = np.asarray(gt)
    s = np.asarray(seg)
    if g.shape != s.shape or g.ndim != 2:
        raise ValueError("gt and seg must be 2D arrays of identical shape")
    both = (g > 0) & (s > 0)
    if not both.any():
        return _EMPTY_I64, _EMPTY_I64, _EMPTY_I64
    gv = g[both].astype(np.int64)
    sv = s[both].astype(np.int64)
    base = int(sv.max()) + 1
    codes, counts = np.unique(gv * base + sv, return_counts=True)
    return codes // base, codes % base, counts.astype(np.int64)


def inner_boundary(labels):
    """Mask of positive pixels with a 4-neighbor of different value or on the
    image edge."""
    lab = np.asarray(labels)
    if lab.ndim != 2:
        raise ValueError("labels must be 2D")
    differs = np.zeros(lab.shape, dtype=bool)
    differs[1:, :] |= lab[1:, :] != lab[:-1, :]
    differs[:-1, :] |= lab[:-1, :] != lab[1:, :]
    differs[:, 1:] |= lab[:, 1:] != lab[:, :-1]
    differs[:, :-1] |= lab[:, :-1] != lab[:, 1:]
    differs[[0, -1], :] = True
    differs[:, [0, -1]] = True
    return (lab > 0) & differs
