import math

import numpy as np

from pdpc.geometry import priority_order
from pdpc.incomplete import IncompleteKdTree, incomplete_dependent_point
from pdpc.oracle import oracle_densities, oracle_dependent
from conftest import random_instance


def path_to_root(t, pid):
    v = int(t.leaf_of[t.slot_of[pid - 1]])
    out = []
    while v >= 0:
        out.append(v)
        v = int(t.base.parent[v])
    return out


def test_first_activation_sets_path(backend):
    X = np.random.default_rng(0).random((300, 2))
    t = IncompleteKdTree(X, backend=backend)
    path = path_to_root(t, 7)
    assert t.activate(7) == len(path)
    assert set(np.flatnonzero(t.is_active)) == set(path)


def test_second_activation_stops_at_shared_prefix(backend):
    X = np.random.default_rng(1).random((300, 2))
    t = IncompleteKdTree(X, backend=backend)
    p1, p2 = path_to_root(t, 1), path_to_root(t, 250)
    f1, f2 = t.activate(1), t.activate(250)
    assert f1 + f2 == len(set(p1) | set(p2))
    assert t.activate(250) == 0


def test_activate_all(backend):
    X = np.random.default_rng(2).random((100, 3))
    t = IncompleteKdTree(X, leaf_cap=4, backend=backend)
    for pid in range(1, 101):
        t.activate(pid)
    assert t.is_active.all()


def test_active_nn(backend):
    rng = np.random.default_rng(3)
    X = np.round(rng.random((500, 2)) * 10) / 10
    t = IncompleteKdTree(X, backend=backend)
    assert t.query_active_nn((0.5, 0.5)) is None
    t.activate(42)
    assert t.query_active_nn((0.5, 0.5))[0] == 42
    active = [42]
    for pid in rng.permutation(np.arange(1, 501))[:200]:
        t.activate(int(pid))
        active.append(int(pid))
        q = rng.random(2)
        A = np.array(sorted(set(active))) - 1
        d2 = ((X[A] - q) ** 2).sum(axis=1)
        best = A[np.lexsort((A, d2))[0]]
        i, dd = t.query_active_nn(q)
        assert i == best + 1
        assert dd == math.sqrt(d2.min())


def test_canonical(backend, canon):
    dep, sq = incomplete_dependent_point(canon, [3, 2, 2, 2, 2], 0, backend=backend)
    assert dep.tolist() == [-1, 0, 0, 1, 3]
    assert np.sqrt(sq).tolist() == [math.inf, 1, 1, math.sqrt(181), 1]


def test_single_point(backend):
    dep, sq = incomplete_dependent_point([[1.0, 1.0]], [1], 0, backend=backend)
    assert dep.tolist() == [-1] and sq[0] == math.inf


def test_identical_points_depend_on_smallest_id(backend):
    # zero distance everywhere: the id tie-break picks id 1 for every point
    X = np.ones((40, 2))
    dep, sq = incomplete_dependent_point(X, [40] * 40, 0, backend=backend)
    assert dep[0] == -1 and (dep[1:] == 0).all() and (sq[1:] == 0).all()


def test_activation_count_follows_order(backend):
    rng = np.random.default_rng(4)
    X = rng.random((200, 2))
    rho = oracle_densities(X, 0.1)
    t = IncompleteKdTree(X, leaf_cap=4, backend=backend)
    for k, i in enumerate(priority_order(rho)):
        assert t.slot_active.sum() == k
        t.activate(int(i) + 1)


def test_matches_oracle(backend):
    rng = np.random.default_rng(5)
    for trial in range(30):
        X = random_instance(rng, grid=trial % 2 == 0)
        rho = oracle_densities(X, float(rng.uniform(0.05, 0.6)))
        rho_min = float(rng.integers(0, 5))
        dep, sq = incomplete_dependent_point(X, rho, rho_min, backend=backend)
        want = oracle_dependent(X, rho, rho_min)
        assert np.array_equal(dep, want[0]) and np.array_equal(sq, want[1])
