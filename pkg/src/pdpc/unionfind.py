"""Concurrent union-find.

Roots are linked by index (the larger index points at the smaller one) with
a compare-and-swap on the root's parent cell, retried on contention; finds
use path splitting. Linking by index makes the final root of every set its
smallest member, whatever the interleaving.
"""

from __future__ import annotations

import threading

import numpy as np

from . import _backend
from ._config import get_num_threads


class UnionFind:
    """Disjoint sets over ``0..n-1``.

    ``union``/``find`` are safe to call from many Python threads; the bulk
    :meth:`union_pairs` runs on the kernel backend's worker pool.
    """

    def __init__(self, n: int, backend=None):
        if n < 0:
            raise ValueError("n must be >= 0")
        self.parent = np.arange(n, dtype=np.int64)
        self.kernels = _backend.get(backend)
        self._cas = threading.Lock()

    def __len__(self):
        return self.parent.shape[0]

    def find(self, a: int) -> int:
        parent = self.parent
        steps = 0
        while True:
            p = int(parent[a])
            if p == a:
                return a
            gp = int(parent[p])
            # any ancestor is a valid parent, so a stale write is harmless
            parent[a] = gp
            a = p
            steps += 1
            if steps > len(parent):
                raise RuntimeError("cycle detected in union-find")

    def union(self, a: int, b: int) -> None:
        while True:
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                return
            if ra < rb:
                ra, rb = rb, ra
            with self._cas:
                if self.parent[ra] == ra:
                    self.parent[ra] = rb
                    return

    def union_pairs(self, a, b) -> None:
        a = np.ascontiguousarray(a, dtype=np.int64)
        b = np.ascontiguousarray(b, dtype=np.int64)
        self.kernels.uf_unite(self.parent, a, b, get_num_threads())

    def roots(self) -> np.ndarray:
        return self.kernels.uf_find_all(self.parent, get_num_threads())

    def components(self) -> list[frozenset]:
        roots = self.roots()
        groups = {}
        for i, r in enumerate(roots.tolist()):
            groups.setdefault(r, []).append(i)
        return sorted((frozenset(g) for g in groups.values()), key=min)


def new_union_find(n: int, backend=None) -> UnionFind:
    return UnionFind(n, backend)
