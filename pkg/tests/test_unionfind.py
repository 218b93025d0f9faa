import threading

import numpy as np
import pytest

from pdpc import _backend
from pdpc._config import num_threads
from pdpc.unionfind import UnionFind, new_union_find


def test_singletons():
    assert len(set(new_union_find(3).roots().tolist())) == 3
    assert len(new_union_find(0)) == 0
    u = new_union_find(1000)
    assert all(u.find(i) == i for i in range(1000))


def test_chain_and_self_union():
    u = new_union_find(5)
    u.union(0, 1)
    u.union(1, 2)
    u.union(3, 3)
    assert u.find(0) == u.find(2)
    assert u.find(3) == 3
    assert u.components() == [frozenset({0, 1, 2}), frozenset({3}), frozenset({4})]


def test_root_is_smallest_member():
    u = new_union_find(10)
    for a, b in [(9, 4), (4, 7), (2, 9)]:
        u.union(a, b)
    assert u.find(7) == 2


def sequential_roots(n, a, b):
    u = UnionFind(n, "python")
    for x, y in zip(a.tolist(), b.tolist()):
        u.union(x, y)
    return u.roots()


@pytest.mark.parametrize("seed", range(20))
def test_concurrent_bulk_matches_sequential(backend, seed):
    rng = np.random.default_rng(seed)
    n, m = 2000, 1500
    a, b = rng.integers(0, n, m), rng.integers(0, n, m)
    want = sequential_roots(n, a, b)
    u = UnionFind(n, backend)
    with num_threads(8):
        u.union_pairs(a, b)
        assert np.array_equal(u.roots(), want)


def test_hundred_thousand_unions_eight_workers():
    backend = _backend.available()[0]
    rng = np.random.default_rng(7)
    n = 200_000
    a, b = rng.integers(0, n, 100_000), rng.integers(0, n, 100_000)
    one = UnionFind(n, backend)
    with num_threads(1):
        one.union_pairs(a, b)
    eight = UnionFind(n, backend)
    with num_threads(8):
        eight.union_pairs(a, b)
    assert np.array_equal(one.roots(), eight.roots())


def test_python_threads_share_structure():
    rng = np.random.default_rng(8)
    n = 3000
    pairs = rng.integers(0, n, (4000, 2))
    want = sequential_roots(n, pairs[:, 0], pairs[:, 1])
    u = UnionFind(n, "python")

    def worker(chunk):
        for x, y in chunk.tolist():
            u.union(x, y)

    threads = [threading.Thread(target=worker, args=(c,)) for c in np.array_split(pairs, 8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert np.array_equal(u.roots(), want)


def test_find_detects_cycle():
    u = new_union_find(3)
    u.parent[:] = [1, 2, 0]
    with pytest.raises(RuntimeError):
        u.find(0)
