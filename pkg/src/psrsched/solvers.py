"""Exact and greedy solvers for the lexicographic zero-run ordering problem."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .objective import (
    FavorabilityMatrix,
    InvalidInputError,
    ObjectiveVector,
    lex_argmin,
    lexicographically_less,
    objective_batch,
    objective_vector,
    strip_trivial_rows,
    vectors_to_array,
)

BRUTE_FORCE_MAX_N = 12
_CHUNK = 40_000


class CapacityError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScheduleSolution:
    order: tuple[int, ...]
    objective: ObjectiveVector
    solver: str
    elapsed: float = field(default=0.0, compare=False)

    def apply(self, F: FavorabilityMatrix) -> FavorabilityMatrix:
        return F.reorder(self.order)


def as_matrix_array(vectors) -> np.ndarray:
    """``M x N`` int8 array from a FavorabilityMatrix, an ``M x N`` ndarray, or
    a sequence of column vectors."""
    if isinstance(vectors, FavorabilityMatrix):
        if vectors.n_nonrta == 0:
            raise InvalidInputError("at least one favorability vector is required")
        return vectors.to_array()
    if isinstance(vectors, np.ndarray):
        if vectors.ndim != 2 or vectors.shape[1] == 0:
            raise InvalidInputError(f"expected an M x N matrix with N >= 1, got shape {vectors.shape}")
        return FavorabilityMatrix.from_array(vectors).to_array()
    return vectors_to_array(vectors)


def _finish(arr: np.ndarray, order: list[int], tag: str, t0: float) -> ScheduleSolution:
    obj = objective_vector(arr[:, order]) if arr.shape[0] else ()
    return ScheduleSolution(tuple(int(k) for k in order), obj, tag, time.perf_counter() - t0)


def brute_force_schedule(vectors, max_n: int = BRUTE_FORCE_MAX_N) -> ScheduleSolution:
    """Lexicographically optimal order by exhaustive search.

    The objective is invariant under cyclic rotation of the columns, so the
    first vector is pinned in place and only the ``(N-1)!`` arrangements of
    the rest are enumerated.  Ties keep the first arrangement in
    :func:`itertools.permutations` order.
    """
    t0 = time.perf_counter()
    arr = as_matrix_array(vectors)
    n = arr.shape[1]
    if n > max_n:
        raise CapacityError(f"brute force refuses N={n} (cap {max_n}); {n - 1}! orders to enumerate")
    red = strip_trivial_rows(arr).reduced
    if red.shape[0] == 0 or n <= 2:
        return _finish(arr, list(range(n)), "brute", t0)

    best_obj = None
    best_perm = None
    perms = itertools.permutations(range(1, n))
    while True:
        chunk = list(itertools.islice(perms, _CHUNK))
        if not chunk:
            break
        p = np.empty((len(chunk), n), dtype=np.intp)
        p[:, 0] = 0
        p[:, 1:] = chunk
        objs = objective_batch(red[:, p].transpose(1, 0, 2))
        k = lex_argmin(objs)
        if best_obj is None or lexicographically_less(tuple(objs[k]), best_obj):
            best_obj = tuple(int(x) for x in objs[k])
            best_perm = p[k].tolist()
    return _finish(arr, best_perm, "brute", t0)


def _insertion_zero_runs(A: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row zero runs after inserting column ``v`` after each column of ``A``.

    Returns shape ``(n, M)``: entry ``[p, r]`` is the zero run of row ``r``
    once ``v`` is placed after column ``p`` (0-based).  Each row is summarised
    once (run lengths, top run, runner-up) so every candidate costs O(M).
    """
    m, n = A.shape
    has_one = A.any(axis=1)
    idx = np.arange(2 * n)

    def runs_ending(X):
        doubled = np.concatenate([X, X], axis=1) != 0
        last_one = np.maximum.accumulate(np.where(doubled, idx, -1), axis=1)
        return (idx - last_one)[:, n:]

    end_run = runs_ending(A)
    start_run = runs_ending(A[:, ::-1])[:, ::-1]
    left = end_run
    right = np.roll(start_run, -1, axis=1)

    is_end = (A == 0) & (np.roll(A, -1, axis=1) != 0)
    lengths = np.where(is_end, end_run, 0)
    top = lengths.max(axis=1)
    n_top = (is_end & (lengths == top[:, None])).sum(axis=1)
    second = np.where(lengths < top[:, None], lengths, 0).max(axis=1)
    others_if_top = np.where(n_top >= 2, top, second)

    span = left + right
    with_zero = np.maximum(top[:, None], span + 1)
    others = np.where(span < top[:, None], top[:, None], others_if_top[:, None])
    with_one = np.maximum(others, np.maximum(left, right))
    z = np.where(v[:, None] != 0, with_one, with_zero)
    z = np.where(has_one[:, None], z, np.where(v[:, None] != 0, n, n + 1))
    return z.T


def _greedy_order(red: np.ndarray) -> list[int]:
    n = red.shape[1]
    order = [0, 1]
    for i in range(2, n):
        cur = red[:, order]
        z = _insertion_zero_runs(cur, red[:, i])
        p = lex_argmin(-np.sort(-z, axis=1))
        order.insert(p + 1, i)
    return order


def greedy_schedule(vectors) -> ScheduleSolution:
    """Greedy insertion: vectors are taken in the given order and each one is
    placed after whichever existing column gives the lexicographically
    smallest objective, keeping the earliest position on ties."""
    t0 = time.perf_counter()
    arr = as_matrix_array(vectors)
    n = arr.shape[1]
    red = strip_trivial_rows(arr).reduced
    if red.shape[0] == 0 or n <= 2:
        return _finish(arr, list(range(n)), "greedy", t0)
    return _finish(arr, _greedy_order(red), "greedy", t0)


@dataclass
class GapReport:
    greedy: ScheduleSolution
    brute: ScheduleSolution
    shuffled: list[ObjectiveVector] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return self.greedy.objective == self.brute.objective

    @property
    def leading_gap(self) -> int:
        if not self.brute.objective:
            return 0
        return self.greedy.objective[0] - self.brute.objective[0]

    @property
    def shuffle_equal_rate(self) -> float:
        if not self.shuffled:
            return float("nan")
        return sum(o == self.brute.objective for o in self.shuffled) / len(self.shuffled)


def evaluate_gap(vectors, repetitions: int = 0, rng_seed=None, max_n: int = BRUTE_FORCE_MAX_N) -> GapReport:
    """Compare greedy and brute force on one instance.

    With ``repetitions > 0`` the greedy solver is also run on that many random
    shuffles of the input order to expose its order sensitivity.
    """
    arr = as_matrix_array(vectors)
    brute = brute_force_schedule(arr, max_n=max_n)
    report = GapReport(greedy_schedule(arr), brute)
    rng = np.random.default_rng(rng_seed)
    for _ in range(repetitions):
        perm = rng.permutation(arr.shape[1])
        report.shuffled.append(greedy_schedule(arr[:, perm]).objective)
    return report
