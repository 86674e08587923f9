"""Label-map core: validated pixel grids of object labels.

A :class:`LabelMap` is an immutable 2D grid of non-negative integers where 0
is background and each positive value names one object. An object may
legally consist of several disconnected regions (a 3D structure can be cut
into pieces by the section plane); :func:`split_components` re-componentizes
when that reading is not wanted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import LabelNotFoundError, ShapeError

MAX_LABEL = np.iinfo(np.int32).max


def _as_label_grid(grid) -> np.ndarray:
    try:
        arr = np.asarray(grid)
    except ValueError as exc:
        raise ShapeError(f"could not interpret grid as an array: {exc}") from exc
    if arr.dtype == object:
        raise ShapeError("grid rows have inconsistent lengths")
    if arr.ndim != 2:
        raise ShapeError(f"grid must be 2D, got {arr.ndim}D")
    if arr.size == 0:
        raise ShapeError("grid must be non-empty")
    if arr.dtype == bool:
        arr = arr.astype(np.int32)
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"labels must be integers, got dtype {arr.dtype}")
    if arr.size and int(arr.min()) < 0:
        raise ValueError("labels must be non-negative")
    if arr.size and int(arr.max()) > MAX_LABEL:
        raise ValueError(f"label values above {MAX_LABEL} are not supported")
    out = np.ascontiguousarray(arr, dtype=np.int32)
    if out is arr:
        out = out.copy()
    return out


@dataclass(frozen=True)
class ObjectRecord:
    """One labeled object: label value, pixel count, inclusive bounding box."""

    label: int
    area: int
    bbox: tuple[int, int, int, int]  # (row_min, col_min, row_max, col_max)
    _map: "LabelMap" = field(repr=False, compare=False)

    @property
    def boundary(self) -> frozenset[tuple[int, int]]:
        """Inner-boundary pixel coordinates, computed lazily via the map."""
        return self._map.boundary_pixels(self.label)


class LabelMap:
    """Immutable 2D label grid with an object inventory.

    Parameters
    ----------
    grid : array-like of non-negative integers
        Row-major label values; 0 is background.
    """

    def __init__(self, grid):
        arr = _as_label_grid(grid)
        arr.flags.writeable = False
        self._labels = arr

    @property
    def labels(self) -> np.ndarray:
        """Read-only int32 view of the label grid."""
        return self._labels

    @property
    def height(self) -> int:
        return self._labels.shape[0]

    @property
    def width(self) -> int:
        return self._labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._labels.shape

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return np.array_equal(self._labels, other._labels)

    __hash__ = None

    def __repr__(self):
        return f"LabelMap({self.height}x{self.width}, {self.n_objects} objects)"

    @cached_property
    def objects(self) -> Mapping[int, ObjectRecord]:
        """Inventory of objects keyed by label, in ascending label order."""
        rows, cols = np.nonzero(self._labels)
        inventory: dict[int, ObjectRecord] = {}
        if rows.size == 0:
            return inventory
        values = self._labels[rows, cols]
        order = np.argsort(values, kind="stable")
        values, rows, cols = values[order], rows[order], cols[order]
        uniq, starts = np.unique(values, return_index=True)
        ends = np.append(starts[1:], values.size)
        for lab, lo, hi in zip(uniq, starts, ends):
            r = rows[lo:hi]
            c = cols[lo:hi]
            inventory[int(lab)] = ObjectRecord(
                label=int(lab),
                area=int(hi - lo),
                bbox=(int(r.min()), int(c.min()), int(r.max()), int(c.max())),
                _map=self,
            )
        return inventory

    @cached_property
    def _boundary_mask(self) -> np.ndarray:
        return _kernels.inner_boundary(self._labels)

    @cached_property
    def _grouped_pixels(self) -> dict[int, np.ndarray]:
        """Per-label (n, 2) pixel coordinate arrays."""
        return _group_points(self._labels, np.ones(self.shape, dtype=bool))

    @cached_property
    def _grouped_boundary(self) -> dict[int, np.ndarray]:
        """Per-label (n, 2) inner-boundary coordinate arrays."""
        return _group_points(self._labels, self._boundary_mask)

    def object_points(self, label: int) -> np.ndarray:
        """All pixel coordinates of one object as an (n, 2) int64 array."""
        self._require(label)
        return self._grouped_pixels[label]

    def object_boundary_points(self, label: int) -> np.ndarray:
        """Inner-boundary coordinates of one object as an (n, 2) int64 array."""
        self._require(label)
        return self._grouped_boundary[label]

    def boundary_pixels(self, label: int) -> frozenset[tuple[int, int]]:
        """Inner boundary of an object: its pixels that touch a different
        label, background, or the image edge (4-neighborhood)."""
        pts = self.object_boundary_points(label)
        return frozenset((int(r), int(c)) for r, c in pts)

    def relabel_sequential(self) -> "LabelMap":
        """Compact positive labels to 1..n in first-occurrence raster order."""
        arr = self._labels
        values, first, inverse = np.unique(
            arr.ravel(), return_index=True, return_inverse=True
        )
        positive = values > 0
        n = int(positive.sum())
        if n == 0:
            return self
        order = np.argsort(first[positive], kind="stable")
        new_values = np.zeros(values.size, dtype=np.int32)
        new_values[np.flatnonzero(positive)[order]] = np.arange(
            1, n + 1, dtype=np.int32
        )
        if np.array_equal(new_values, values):
            return self
        return LabelMap(new_values[inverse].reshape(arr.shape))

    def _require(self, label: int) -> None:
        if label not in self.objects:
            raise LabelNotFoundError(f"label {label} not present in map")


def _group_points(labels: np.ndarray, where: np.ndarray) -> dict[int, np.ndarray]:
    rows, cols = np.nonzero((labels > 0) & where)
    if rows.size == 0:
        return {}
    values = labels[rows, cols]
    order = np.argsort(values, kind="stable")
    values, rows, cols = values[order], rows[order], cols[order]
    uniq, starts = np.unique(values, return_index=True)
    ends = np.append(starts[1:], values.size)
    points = np.stack([rows, cols], axis=1).astype(np.int64)
    return {int(lab): points[lo:hi] for lab, lo, hi in zip(uniq, starts, ends)}


def from_grid(grid) -> LabelMap:
    """Build a validated LabelMap from a 2D grid of non-negative integers."""
    return LabelMap(grid)


def connected_components(mask, connectivity: int = 8) -> LabelMap:
    """Label maximal connected foreground regions of a binary grid.

    Labels are assigned sequentially in raster order of each region's first
    pixel, so the result is deterministic.
    """
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ShapeError(f"mask must be 2D, got {m.ndim}D")
    labels, _ = _kernels.label_components(m != 0, connectivity)
    return LabelMap(labels)


def relabel_sequential(label_map: LabelMap) -> LabelMap:
    """Function form of :meth:`LabelMap.relabel_sequential`."""
    return label_map.relabel_sequential()


def boundary_pixels(label_map: LabelMap, label: int) -> frozenset[tuple[int, int]]:
    """Function form of :meth:`LabelMap.boundary_pixels`."""
    return label_map.boundary_pixels(label)


def split_components(label_map: LabelMap, connectivity: int = 8) -> LabelMap:
    """Split disconnected same-label regions into separate objects.

    Pixels stay in the same object iff they share both the original label and
    a connected region under the given connectivity. Output labels are
    sequential in first-occurrence raster order.
    """
    arr = label_map.labels
    comps, _ = _kernels.label_components(arr > 0, connectivity)
    codes = comps.astype(np.int64) * (int(arr.max()) + 1) + arr
    values, first, inverse = np.unique(
        codes.ravel(), return_index=True, return_inverse=True
    )
    positive = values > 0
    order = np.argsort(first[positive], kind="stable")
    new_values = np.zeros(values.size, dtype=np.int32)
    new_values[np.flatnonzero(positive)[order]] = np.arange(
        1, int(positive.sum()) + 1, dtype=np.int32
    )
    return LabelMap(new_values[inverse].reshape(arr.shape))
