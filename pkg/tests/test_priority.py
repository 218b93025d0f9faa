import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdpc import _backend
from pdpc.geometry import BoundingBox, PriorityKey, priority_ranks
from pdpc.oracle import oracle_densities, oracle_dependent, oracle_priority_range
from pdpc.priority import (PrioritySearchKdTree, build_priority_tree,
                           priority_dependent_point, query_priority_nn,
                           query_priority_range)
from structure import connected_top_violations, priority_violations

CANON_RHO = np.array([3, 2, 2, 2, 2])


def test_single_node(backend):
    t = build_priority_tree([[1.0, 2.0]], [5], backend=backend)
    assert t.n == 1 and t.left[0] == -1 and t.right[0] == -1


def test_collinear_three(backend):
    X = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]
    t = build_priority_tree(X, [1, 3, 2], backend=backend)
    assert t.idx[0] == 1
    kids = [c for c in (t.left[0], t.right[0]) if c >= 0]
    assert len(kids) == 2
    assert all(t.end[c] - c == 1 for c in kids)


def test_structure_random(backend):
    rng = np.random.default_rng(0)
    for _ in range(5):
        X = rng.random((500, int(rng.integers(1, 5))))
        rho = rng.integers(0, 20, 500)
        t = build_priority_tree(X, rho, backend=backend, grain=32)
        assert priority_violations(t) == []
        for thr in rng.integers(0, 501, 20):
            assert connected_top_violations(t, thr) == []


def test_backends_identical_layout():
    if len(_backend.available()) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(1)
    X = rng.random((3000, 2))
    rank = priority_ranks(rng.integers(0, 50, 3000))
    a = PrioritySearchKdTree(X, rank, backend="compiled", grain=16)
    b = PrioritySearchKdTree(X, rank, backend="python")
    for f in ("idx", "rank", "lo", "hi", "end", "left", "right"):
        assert np.array_equal(getattr(a, f), getattr(b, f)), f


def test_query_canonical(backend, canon):
    t = build_priority_tree(canon, CANON_RHO, backend=backend)
    i, dd = query_priority_nn(t, canon[3], PriorityKey(2, 4))
    assert i == 2 and dd == math.sqrt(181)


def test_query_above_everything_is_none(backend, canon):
    t = build_priority_tree(canon, CANON_RHO, backend=backend)
    assert query_priority_nn(t, (0, 0), PriorityKey(3, 1)) is None
    assert query_priority_nn(t, (0, 0), PriorityKey(9, 1)) is None


def test_query_below_everything_is_plain_nn(backend):
    rng = np.random.default_rng(2)
    X = rng.random((300, 3))
    rho = rng.integers(0, 5, 300)
    t = build_priority_tree(X, rho, backend=backend)
    for q in rng.random((30, 3)):
        i, _ = query_priority_nn(t, q, PriorityKey.lowest())
        d2 = ((X - q) ** 2).sum(axis=1)
        assert d2[i - 1] == d2.min()


def test_visits_bounded_by_full_walk(backend):
    rng = np.random.default_rng(3)
    X = rng.random((400, 2))
    rank = priority_ranks(rng.integers(0, 10, 400))
    t = PrioritySearchKdTree(X, rank, backend=backend)
    _, _, visits = t.nn_many(X, rank)
    assert (visits <= 400).all()
    assert visits.sum() < 400 * 400 // 4


@given(st.integers(0, 2**32 - 1))
def test_dependent_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    X = rng.random((int(rng.integers(1, 300)), int(rng.integers(1, 5))))
    if seed % 2:
        X = np.round(X * 5) / 5
    rho = oracle_densities(X, float(rng.uniform(0.05, 0.5)))
    rho_min = float(rng.integers(0, 4))
    want = oracle_dependent(X, rho, rho_min)
    for b in _backend.available():
        dep, sq = priority_dependent_point(X, rho, rho_min, backend=b, grain=8)
        assert np.array_equal(dep, want[0]) and np.array_equal(sq, want[1])


def test_dependent_small_cases(backend):
    dep, sq = priority_dependent_point([[0.0], [1.0]], [2, 1], 0, backend=backend)
    assert dep.tolist() == [-1, 0] and sq[1] == 1.0
    dep, _ = priority_dependent_point([[0.0], [1.0], [3.0]], [2, 1, 1], 5, backend=backend)
    assert (dep == -1).all()


def test_range_examples(backend, canon):
    t = build_priority_tree(canon, CANON_RHO, backend=backend)
    everything = BoundingBox((-100, -100), (100, 100))
    assert query_priority_range(t, everything, PriorityKey.lowest()) == {1, 2, 3, 4, 5}
    assert query_priority_range(t, everything, PriorityKey(3, 1)) == set()
    # closed bounds: A and B lie on the edge
    assert query_priority_range(t, BoundingBox((0, 0), (1, 0)), PriorityKey.lowest()) == {1, 2}


def test_range_matches_oracle(backend):
    rng = np.random.default_rng(4)
    X = np.round(rng.random((500, 2)) * 20) / 20
    rho = rng.integers(0, 10, 500)
    t = build_priority_tree(X, rho, backend=backend)
    for _ in range(100):
        a, b = rng.random((2, 2))
        box = BoundingBox(np.minimum(a, b), np.maximum(a, b))
        key = PriorityKey(int(rng.integers(0, 10)), int(rng.integers(1, 501)))
        assert query_priority_range(t, box, key) == oracle_priority_range(X, rho, box, key)
