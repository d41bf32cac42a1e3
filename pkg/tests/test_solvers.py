import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psrsched.objective import FavorabilityMatrix, FavorabilityVector, InvalidInputError, lexicographically_less, objective_vector
from psrsched.solvers import (
    CapacityError,
    brute_force_schedule,
    evaluate_gap,
    greedy_schedule,
)

from conftest import nontrivial_matrix
from oracles import brute_naive, greedy_naive

ALTERNATING = [(1, 0), (0, 1), (1, 0), (0, 1)]


def test_brute_alternating():
    sol = brute_force_schedule(ALTERNATING)
    assert sol.objective == (1, 1)
    assert sol.solver == "brute"
    assert sol.order[0] == 0


def test_brute_degenerate_cases():
    assert brute_force_schedule([(1, 0)]).objective == (1, 0)
    assert brute_force_schedule([(1, 0)]).order == (0,)
    assert brute_force_schedule([(1, 0)] * 3).objective == (3, 0)


def test_greedy_alternating_hand_trace():
    sol = greedy_schedule(ALTERNATING)
    assert sol.order == (0, 3, 2, 1)
    assert sol.objective == (1, 1)


def test_greedy_degenerate_cases():
    assert greedy_schedule([(1, 0), (0, 1)]).order == (0, 1)
    assert greedy_schedule([(0, 1)]).order == (0,)
    assert greedy_schedule([(0, 1)]).objective == (1, 0)


def test_accepts_matrix_types():
    vecs = [FavorabilityVector(v, k) for k, v in enumerate(ALTERNATING)]
    F = FavorabilityMatrix(tuple(vecs))
    arr = F.to_array()
    for inp in (vecs, F, arr, ALTERNATING):
        assert greedy_schedule(inp).order == (0, 3, 2, 1)
        assert brute_force_schedule(inp).objective == (1, 1)
    assert greedy_schedule(arr).apply(F).sta_ids == [0, 3, 2, 1]


def test_empty_input_rejected():
    with pytest.raises(InvalidInputError):
        greedy_schedule([])
    with pytest.raises(InvalidInputError):
        brute_force_schedule(np.zeros((2, 0)))


def test_all_rows_trivial_keeps_input_order():
    arr = np.array([[1, 1, 1, 1], [0, 0, 0, 0]])
    for fn in (greedy_schedule, brute_force_schedule):
        sol = fn(arr)
        assert sol.order == (0, 1, 2, 3)
        assert sol.objective == (4, 0)


def test_no_rta_rows():
    arr = np.zeros((0, 5), dtype=int)
    assert greedy_schedule(arr).objective == ()
    assert brute_force_schedule(arr).order == tuple(range(5))


def test_brute_cap():
    arr = np.tile([[1, 0]], (1, 7))
    with pytest.raises(CapacityError):
        brute_force_schedule(arr)
    with pytest.raises(CapacityError):
        brute_force_schedule(np.tile([[1, 0]], (1, 3)), max_n=5)


def test_brute_matches_naive_enumeration(rng):
    for _ in range(150):
        m, n = rng.integers(1, 5), rng.integers(1, 7)
        a = rng.integers(0, 2, size=(m, n))
        assert brute_force_schedule(a).objective == brute_naive(a.tolist())


def test_greedy_matches_naive_insertion(rng):
    for _ in range(300):
        m, n = rng.integers(1, 6), rng.integers(3, 10)
        a = rng.integers(0, 2, size=(m, n))
        assert list(greedy_schedule(a).order) == greedy_naive(a.tolist())


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 7), st.data())
def test_solver_invariants(m, n, data):
    rows = np.array([data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)) for _ in range(m)])
    g, b = greedy_schedule(rows), brute_force_schedule(rows)
    for sol in (g, b):
        assert sorted(sol.order) == list(range(n))
        assert objective_vector(rows[:, list(sol.order)]) == sol.objective
    assert not lexicographically_less(g.objective, b.objective)


def test_determinism(rng):
    a = nontrivial_matrix(rng, 4, 8)
    assert greedy_schedule(a) == greedy_schedule(a.copy())
    assert brute_force_schedule(a) == brute_force_schedule(a.copy())


def test_brute_independent_of_input_order_up_to_ties(rng):
    a = nontrivial_matrix(rng, 3, 7)
    perm = rng.permutation(7)
    assert brute_force_schedule(a).objective == brute_force_schedule(a[:, perm]).objective


def test_evaluate_gap_alternating():
    rep = evaluate_gap(ALTERNATING, repetitions=10, rng_seed=3)
    assert rep.equal and rep.leading_gap == 0
    assert len(rep.shuffled) == 10
    assert 0 <= rep.shuffle_equal_rate <= 1


def test_evaluate_gap_identical_vectors():
    rep = evaluate_gap([(1, 0, 1)] * 5)
    assert rep.equal and rep.leading_gap == 0
    assert np.isnan(rep.shuffle_equal_rate)


def test_evaluate_gap_soundness_and_cap(rng):
    for _ in range(50):
        rep = evaluate_gap(nontrivial_matrix(rng, 3, 6))
        assert rep.leading_gap >= 0
        assert not lexicographically_less(rep.greedy.objective, rep.brute.objective)
    with pytest.raises(CapacityError):
        evaluate_gap(np.tile([[1, 0]], (1, 7)))


def test_greedy_handles_large_n(rng):
    a = nontrivial_matrix(rng, 8, 60)
    sol = greedy_schedule(a)
    assert sorted(sol.order) == list(range(60))
