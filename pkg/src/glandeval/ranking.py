"""Leaderboard construction: competition ranks per column, rank-sum order.

Each entry receives one ranking score per (metric, test part) column; ties
share a rank and the next distinct score skips the tied positions (scores
0.8, 0.7, 0.7, 0.6 rank 1, 2, 2, 4). The final order sorts by the sum of an
entry's ranks, smallest first; tied sums order lexicographically by entry
name and are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidScoreError, ValidationError

DIRECTIONS = ("higher-better", "lower-better")


@dataclass(frozen=True)
class ScoreColumn:
    metric: str
    part: str
    direction: str  # "higher-better" | "lower-better"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValidationError(
                f"direction must be one of {DIRECTIONS}, got {self.direction!r}"
            )

    @property
    def key(self) -> str:
        return f"{self.metric}/{self.part}"


@dataclass(frozen=True)
class ScoreTable:
    """Entries x columns score matrix; every cell filled."""

    entries: tuple[str, ...]
    columns: tuple[ScoreColumn, ...]
    values: np.ndarray  # shape (len(entries), len(columns)), float64

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise ValidationError("duplicate entry names in score table")
        if not self.entries or not self.columns:
            raise ValidationError("score table needs at least one entry and one column")
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.entries), len(self.columns)):
            raise ValidationError(
                f"score matrix shape {values.shape} does not match "
                f"{len(self.entries)} entries x {len(self.columns)} columns"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class Leaderboard:
    """Per-column ranks, rank sums, and the final ordering."""

    entries: tuple[str, ...]
    columns: tuple[ScoreColumn, ...]
    per_column_ranks: np.ndarray  # ints, aligned with entries x columns
    rank_sums: tuple[int, ...]
    final_order: tuple[str, ...]
    tied_groups: tuple[tuple[str, ...], ...]  # entries sharing a rank sum


def rank_column(scores, direction: str) -> list[int]:
    """Standard competition ranks for one column; best score ranks 1."""
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    arr = np.asarray(list(scores), dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("cannot rank an empty column")
    if np.isnan(arr).any():
        raise InvalidScoreError("NaN score in ranking column")
    if direction == "higher-better":
        beats = arr[:, None] > arr[None, :]
    else:
        beats = arr[:, None] < arr[None, :]
    return [1 + int(n) for n in beats.sum(axis=0)]


def rank_sum(table: ScoreTable) -> Leaderboard:
    """Build the leaderboard: rank every column, sum ranks, sort ascending."""
    ranks = np.column_stack(
        [
            rank_column(table.values[:, k], col.direction)
            for k, col in enumerate(table.columns)
        ]
    )
    sums = ranks.sum(axis=1)
    order = sorted(range(len(table.entries)), key=lambda i: (sums[i], table.entries[i]))
    groups: dict[int, list[str]] = {}
    for i in order:
        groups.setdefault(int(sums[i]), []).append(table.entries[i])
    tied = tuple(tuple(g) for g in groups.values() if len(g) > 1)
    return Leaderboard(
        entries=table.entries,
        columns=table.columns,
        per_column_ranks=ranks,
        rank_sums=tuple(int(s) for s in sums),
        final_order=tuple(table.entries[i] for i in order),
        tied_groups=tied,
    )
