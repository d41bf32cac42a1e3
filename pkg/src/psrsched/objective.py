"""Favorability data model and the zero-run objective.

A schedule period is a binary matrix with one row per RTA station and one
column per non-RTA station, columns in transmission order.  Row ``r`` of the
matrix says, for each scheduled uplink, whether RTA station ``r`` may use the
PSR opportunity it creates.  The quality of an order is the descending-sorted
vector of the longest circular run of zeros in every row, compared
lexicographically (smaller is better).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

ObjectiveVector = tuple[int, ...]


class InvalidInputError(ValueError):
    pass


@dataclass(frozen=True)
class FavorabilityVector:
    """PSR favorability of one non-RTA station towards every RTA station."""

    entries: tuple[int, ...]
    sta_id: Hashable = None

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e not in (0, 1) for e in entries):
            raise InvalidInputError(f"favorability entries must be 0 or 1, got {self.entries!r}")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class FavorabilityMatrix:
    """Ordered columns of favorability vectors; the column order is the schedule."""

    columns: tuple[FavorabilityVector, ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        if cols and len({len(c) for c in cols}) != 1:
            raise InvalidInputError("all favorability vectors must have the same length")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_array(cls, rows, sta_ids: Sequence[Hashable] | None = None) -> FavorabilityMatrix:
        """Build from an ``M x N`` array (rows are RTA stations)."""
        arr = _as_binary_2d(rows)
        ids = range(arr.shape[1]) if sta_ids is None else sta_ids
        return cls(tuple(FavorabilityVector(tuple(arr[:, k]), sid) for k, sid in zip(range(arr.shape[1]), ids)))

    @property
    def n_rta(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def n_nonrta(self) -> int:
        return len(self.columns)

    @property
    def sta_ids(self) -> list:
        return [c.sta_id for c in self.columns]

    def to_array(self) -> np.ndarray:
        if not self.columns:
            return np.zeros((0, 0), dtype=np.int8)
        return np.array([c.entries for c in self.columns], dtype=np.int8).T.reshape(self.n_rta, self.n_nonrta)

    def reorder(self, order: Sequence[int]) -> FavorabilityMatrix:
        if sorted(order) != list(range(self.n_nonrta)):
            raise InvalidInputError(f"{list(order)} is not a permutation of 0..{self.n_nonrta - 1}")
        return FavorabilityMatrix(tuple(self.columns[k] for k in order))


def _as_binary_2d(rows) -> np.ndarray:
    if isinstance(rows, FavorabilityMatrix):
        return rows.to_array()
    arr = np.asarray(rows)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D favorability matrix, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidInputError("favorability matrix must be binary")
    return arr.astype(np.int8)


def vectors_to_array(vectors: Iterable[FavorabilityVector | Sequence[int]]) -> np.ndarray:
    """Stack favorability vectors as the columns of an ``M x N`` array."""
    cols = [v.entries if isinstance(v, FavorabilityVector) else tuple(v) for v in vectors]
    if not cols:
        raise InvalidInputError("at least one favorability vector is required")
    if len({len(c) for c in cols}) != 1:
        raise InvalidInputError("all favorability vectors must have the same length")
    arr = np.array(cols, dtype=np.int8).reshape(len(cols), len(cols[0])).T
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidInputError("favorability entries must be 0 or 1")
    return np.ascontiguousarray(arr)


def max_circular_zero_run(row: Sequence[int]) -> int:
    """Longest run of zeros in ``row`` repeated periodically.

    An all-zero row returns ``len(row)``; the run is really unbounded but a
    finite sentinel keeps objectives comparable.
    """
    n = len(row)
    if n == 0:
        raise InvalidInputError("row must not be empty")
    if not any(row):
        return n
    best = run = 0
    for bit in (*row, *row):
        if bit:
            run = 0
        else:
            run += 1
            best = max(best, run)
    return best


def circular_zero_runs(rows) -> np.ndarray:
    """Vectorised :func:`max_circular_zero_run` over the last axis of ``rows``."""
    arr = np.asarray(rows)
    n = arr.shape[-1]
    if n == 0:
        raise InvalidInputError("rows must not be empty")
    doubled = np.concatenate([arr, arr], axis=-1) != 0
    idx = np.arange(2 * n)
    last_one = np.maximum.accumulate(np.where(doubled, idx, -1), axis=-1)
    runs = (idx - last_one).max(axis=-1)
    return np.minimum(runs, n).astype(np.int64)


def objective_vector(F) -> ObjectiveVector:
    """Zero-run lengths of every row of ``F``, sorted non-increasing."""
    arr = _as_binary_2d(F)
    if arr.shape[1] == 0:
        raise InvalidInputError("favorability matrix has no columns")
    return tuple(sorted((int(z) for z in circular_zero_runs(arr)), reverse=True))


def objective_batch(batch: np.ndarray) -> np.ndarray:
    """Objectives for a stack of matrices shaped ``(P, M, N)`` -> ``(P, M)``."""
    z = circular_zero_runs(batch)
    return -np.sort(-z, axis=-1)


def lexicographically_less(v: Sequence[int], w: Sequence[int]) -> bool:
    if len(v) != len(w):
        raise InvalidInputError(f"cannot compare objectives of length {len(v)} and {len(w)}")
    for a, b in zip(v, w):
        if a < b:
            return True
        if a > b:
            return False
    return False


def lex_argmin(objectives: np.ndarray) -> int:
    """Index of the first lexicographically smallest row of a ``(P, M)`` array."""
    if objectives.shape[1] == 0:
        return 0
    # lexsort is stable and treats its last key as primary
    return int(np.lexsort(objectives.T[::-1])[0])


@dataclass(frozen=True)
class RowReduction:
    """Result of :func:`strip_trivial_rows`."""

    reduced: np.ndarray
    kept_rows: tuple[int, ...]
    fixed_values: dict[int, int]

    def reattach(self, reduced_z: Sequence[int]) -> list[int]:
        """Per-row zero runs for the full matrix, in original row order."""
        full = dict(self.fixed_values)
        full.update(zip(self.kept_rows, (int(z) for z in reduced_z)))
        return [full[r] for r in sorted(full)]


def strip_trivial_rows(F) -> RowReduction:
    """Drop all-zero and all-one rows; their zero runs do not depend on the order."""
    arr = _as_binary_2d(F)
    n = arr.shape[1]
    ones = arr.sum(axis=1)
    trivial = (ones == 0) | (ones == n)
    fixed = {int(r): (n if ones[r] == 0 else 0) for r in np.flatnonzero(trivial)}
    kept = tuple(int(r) for r in np.flatnonzero(~trivial))
    return RowReduction(arr[list(kept)], kept, fixed)
