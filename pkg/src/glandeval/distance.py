"""Hausdorff distance between pixel sets on a grid.

The distance is the larger of the two directed sup-inf Euclidean distances
over pixel centers. It is computed exactly: the squared distance from every
pixel of one set to the nearest pixel of the other comes from an exact
squared Euclidean distance transform over the union bounding box, so the
result is sqrt of an integer, identical to an all-pairs scan.

``boundary`` mode (the default) measures between the inner boundaries of the
two sets; ``full`` mode uses every pixel.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import UndefinedInputError

HAUSDORFF_MODES = ("boundary", "full")


def _as_points(pixels) -> np.ndarray:
    """Coerce a boolean mask or a collection of (row, col) pairs to (n, 2)."""
    if isinstance(pixels, np.ndarray) and pixels.dtype == bool:
        if pixels.ndim != 2:
            raise UndefinedInputError("boolean pixel mask must be 2D")
        return np.argwhere(pixels).astype(np.int64)
    pts = np.asarray(sorted(pixels) if isinstance(pixels, (set, frozenset)) else list(pixels))
    if pts.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise UndefinedInputError("pixel set must be (row, col) pairs or a boolean mask")
    return pts.astype(np.int64)


def _boundary_points(points: np.ndarray) -> np.ndarray:
    """Inner boundary of a point set, rasterized over its bounding box."""
    rmin = points[:, 0].min()
    cmin = points[:, 1].min()
    local = points - [rmin, cmin]
    mask = np.zeros((local[:, 0].max() + 1, local[:, 1].max() + 1), dtype=np.int32)
    mask[local[:, 0], local[:, 1]] = 1
    keep = _kernels.inner_boundary(mask)[local[:, 0], local[:, 1]]
    return points[keep]


def directed_sq_max(from_points: np.ndarray, to_points: np.ndarray) -> int:
    """Max over ``from_points`` of the squared distance to ``to_points``."""
    rmin = min(int(from_points[:, 0].min()), int(to_points[:, 0].min()))
    cmin = min(int(from_points[:, 1].min()), int(to_points[:, 1].min()))
    rmax = max(int(from_points[:, 0].max()), int(to_points[:, 0].max()))
    cmax = max(int(from_points[:, 1].max()), int(to_points[:, 1].max()))
    target = np.zeros((rmax - rmin + 1, cmax - cmin + 1), dtype=bool)
    target[to_points[:, 0] - rmin, to_points[:, 1] - cmin] = True
    sq = _kernels.sq_edt(target)
    return int(sq[from_points[:, 0] - rmin, from_points[:, 1] - cmin].max())


def hausdorff_points(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two non-empty (n, 2) point arrays."""
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise UndefinedInputError("Hausdorff distance of an empty pixel set is undefined")
    return math.sqrt(max(directed_sq_max(a, b), directed_sq_max(b, a)))


def hausdorff(a, b, mode: str = "boundary") -> float:
    """Hausdorff distance between two pixel sets.

    Parameters
    ----------
    a, b : boolean masks or collections of (row, col) pairs
    mode : "boundary" or "full"
        Which pixels of each set enter the distance.
    """
    if mode not in HAUSDORFF_MODES:
        raise ValueError(f"mode must be one of {HAUSDORFF_MODES}, got {mode!r}")
    pa = _as_points(a)
    pb = _as_points(b)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise UndefinedInputError("Hausdorff distance of an empty pixel set is undefined")
    if mode == "boundary":
        pa = _boundary_points(pa)
        pb = _boundary_points(pb)
    return hausdorff_points(pa, pb)
