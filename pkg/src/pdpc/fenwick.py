"""Dependent points through a Fenwick layout of kd-trees.

Points are sorted by descending priority; tree ``B[i]`` (1-based) holds
ranks ``[i - lsb(i) + 1, i]``. The ranks above a point at rank ``i`` are
covered by ``O(log i)`` disjoint trees; each is searched independently and
the answers are merged with a write-min on ``(distance, id)``.
"""

from __future__ import annotations

import math

import numpy as np

from ._config import get_num_threads
from .geometry import UsageError, as_pointset, priority_order
from .kdtree import GRAIN, LEAF_CAP, KdTree


def lsb(i: int) -> int:
    return i & -i


def fenwick_cover(i: int) -> list[int]:
    """Tree indices whose ranges tile ``[1, i]``, largest index first."""
    if i < 0:
        raise UsageError("rank bound must be >= 0")
    out = []
    while i > 0:
        out.append(i)
        i -= lsb(i)
    return out


def fenwick_range(i: int) -> tuple[int, int]:
    """Inclusive rank range stored by tree ``B[i]``."""
    return i - lsb(i) + 1, i


def write_min(cell, candidate):
    """Keep the smaller ``(sqdist, index)`` pair; index ``-1`` is empty.

    Associative and commutative, so concurrent or reordered merges end with
    the same cell.
    """
    if candidate[1] < 0:
        return cell
    if cell[1] < 0:
        return candidate
    return min(cell, candidate)


class FenwickIndex:
    """``order`` lists 0-based point indices by descending priority;
    ``forest`` stores tree ``B[i]`` as its tree number ``i - 1``."""

    def __init__(self, coords, order, leaf_cap=LEAF_CAP, grain=GRAIN, backend=None):
        n = len(order)
        if n < 1:
            raise UsageError("Fenwick index needs at least one point")
        self.order = np.asarray(order, dtype=np.int64)
        segments = [self.order[i - lsb(i):i] for i in range(1, n + 1)]
        self.forest = KdTree(coords, segments, leaf_cap, grain, backend)
        self.kernels = self.forest.kernels

    @property
    def n(self) -> int:
        return len(self.order)

    def tree_sizes(self) -> np.ndarray:
        return self.forest.sizes.copy()

    def tree_members(self, i: int) -> np.ndarray:
        """1-based ranks stored in ``B[i]``."""
        f = self.forest
        s = f.slot_off[i - 1]
        members = f.idx[s:s + f.sizes[i - 1]]
        rank = np.empty(self.n, dtype=np.int64)
        rank[self.order] = np.arange(1, self.n + 1)
        return np.sort(rank[members])

    def query_many(self, bound: int, q):
        """``(index, sqdist)`` of the nearest point among ranks ``[1, bound]``."""
        if bound < 0 or bound > self.n:
            raise UsageError("rank bound out of range")
        q = np.ascontiguousarray(q, dtype=np.float64)
        return self.kernels.fenwick_query_one(self.forest, int(bound), q)


def build_fenwick_index(points, rho, leaf_cap=LEAF_CAP, grain=GRAIN,
                        backend=None) -> FenwickIndex:
    ps = as_pointset(points)
    return FenwickIndex(ps.coords, priority_order(rho), leaf_cap, grain, backend)


def fenwick_query(idx: FenwickIndex, i: int, q):
    """Nearest point among ranks ``[1, i]`` as ``(id, distance)`` or ``None``."""
    j, sq = idx.query_many(i, q)
    if j < 0:
        return None
    return int(j) + 1, math.sqrt(sq)


def fenwick_dependent_point(points, rho, rho_min, backend=None,
                            leaf_cap=LEAF_CAP, grain=GRAIN):
    """Returns ``(dependent, sqdist)`` like the other finders."""
    ps = as_pointset(points)
    rho = np.asarray(rho)
    index = build_fenwick_index(ps, rho, leaf_cap, grain, backend)
    noise = np.ascontiguousarray(rho < rho_min, dtype=np.uint8)
    return index.kernels.fenwick_dependent(index.forest, ps.coords, index.order,
                                           noise, get_num_threads())
