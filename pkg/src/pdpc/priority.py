"""Priority search kd-tree: every node stores its subtree's top-priority point.

Node ``v`` keeps the highest-priority point of its point set in slot ``v``;
the remaining points are split at the median of the widest side of the
node's tight box. Because slot and node indices coincide, the tree needs no
separate point storage and subtrees occupy contiguous slot ranges.

Priorities are passed as ranks (0 = highest, see
:func:`pdpc.geometry.priority_ranks`), which makes every comparison an
exact integer comparison.
"""

from __future__ import annotations

import math

import numpy as np

from . import _backend
from ._config import get_num_threads
from .geometry import BoundingBox, PriorityKey, UsageError, as_pointset, priority_ranks
from .kdtree import GRAIN


class PrioritySearchKdTree:
    """Attributes mirror :class:`pdpc.kdtree.KdTree`, plus ``rank`` (the
    stored point's priority rank per node) and ``rho`` (priority value per
    original point, used to form keys)."""

    def __init__(self, coords, rank, rho=None, grain=GRAIN, backend=None):
        coords = np.ascontiguousarray(coords, dtype=np.float64)
        n, d = coords.shape
        if n < 1:
            raise UsageError("priority tree needs at least one point")
        rank = np.ascontiguousarray(rank, dtype=np.int64)
        if rank.shape != (n,):
            raise UsageError("need one rank per point")
        self.kernels = _backend.get(backend)
        self.rho = None if rho is None else np.asarray(rho)
        self.point_rank = rank
        self.pts = coords.copy()
        self.idx = np.arange(n, dtype=np.int64)
        self.rank = rank.copy()
        self.lo = np.empty((n, d))
        self.hi = np.empty((n, d))
        self.end = np.empty(n, dtype=np.int64)
        self.left = np.empty(n, dtype=np.int64)
        self.right = np.empty(n, dtype=np.int64)
        self.split_dim = np.empty(n, dtype=np.int64)
        self.split_val = np.empty(n)
        self.kernels.build_priority(self, int(grain), get_num_threads())

    @property
    def n(self) -> int:
        return self.pts.shape[0]

    @property
    def d(self) -> int:
        return self.pts.shape[1]

    def key_of_node(self, v: int) -> PriorityKey:
        if self.rho is None:
            raise UsageError("tree was built from ranks only")
        i = int(self.idx[v])
        return PriorityKey(float(self.rho[i]), i + 1)

    # ------------------------------------------------------------- queries

    def rank_of_key(self, key: PriorityKey) -> int:
        """Threshold rank equivalent to ``key``.

        A point beats ``key`` exactly when its rank is below the returned
        value. Works for keys of stored points and for arbitrary keys.
        """
        if self.rho is None:
            raise UsageError("tree was built from ranks only; pass ranks")
        rho = self.rho.astype(np.float64)
        ids = np.arange(1, self.n + 1)
        beats = (rho > key.rho) | ((rho == key.rho) & (ids < key.id))
        return int(np.count_nonzero(beats))

    def nn_many(self, queries, qrank):
        """Priority NN for each query against threshold ranks ``qrank``.

        Returns ``(index, squared_distance, visits)`` with index ``-1`` when
        no stored point outranks the threshold.
        """
        q = np.ascontiguousarray(queries, dtype=np.float64)
        if q.ndim == 1:
            q = q.reshape(1, -1)
        if q.shape[1] != self.d:
            raise UsageError("query dimension does not match tree")
        qrank = np.ascontiguousarray(np.broadcast_to(qrank, (q.shape[0],)),
                                     dtype=np.int64)
        return self.kernels.priority_nn(self, q, qrank, get_num_threads())

    def query_priority_nn(self, q, gamma_q: PriorityKey):
        """Nearest point whose key beats ``gamma_q`` as ``(id, distance)``."""
        i, sq, _ = self.nn_many(q, self.rank_of_key(gamma_q))
        if i[0] < 0:
            return None
        return int(i[0]) + 1, math.sqrt(sq[0])

    def range_ids(self, box: BoundingBox, qrank: int, count_visits=False):
        """0-based indices inside ``box`` (closed) with rank below ``qrank``."""
        lo, hi = box.lo, box.hi
        out = []
        visits = 0
        if self.rank[0] < qrank:
            stack = [0]
        else:
            stack = []
        while stack:
            v = stack.pop()
            if np.any(self.hi[v] < lo) or np.any(self.lo[v] > hi):
                continue
            visits += 1
            p = self.pts[v]
            if np.all(lo <= p) and np.all(p <= hi):
                out.append(int(self.idx[v]))
            for c in (self.right[v], self.left[v]):
                if c >= 0 and self.rank[c] < qrank:
                    stack.append(int(c))
        out.sort()
        ids = np.array(out, dtype=np.int64)
        return (ids, visits) if count_visits else ids

    def query_priority_range(self, box: BoundingBox, gamma_q: PriorityKey):
        """1-based ids inside ``box`` whose key beats ``gamma_q``."""
        return set((self.range_ids(box, self.rank_of_key(gamma_q)) + 1).tolist())


def build_priority_tree(points, rho, grain=GRAIN, backend=None) -> PrioritySearchKdTree:
    ps = as_pointset(points)
    rho = np.asarray(rho)
    if rho.shape != (ps.n,):
        raise UsageError("need one priority value per point")
    return PrioritySearchKdTree(ps.coords, priority_ranks(rho), rho, grain, backend)


def query_priority_nn(tree: PrioritySearchKdTree, q, gamma_q: PriorityKey):
    return tree.query_priority_nn(q, gamma_q)


def query_priority_range(tree: PrioritySearchKdTree, box_q: BoundingBox,
                         gamma_q: PriorityKey):
    return tree.query_priority_range(box_q, gamma_q)


def priority_dependent_point(points, rho, rho_min, backend=None, grain=GRAIN):
    """Dependent point of every non-noise point, all queries in parallel.

    Returns ``(dependent, sqdist)``: 0-based dependent index per point
    (``-1`` when undefined) and squared dependent distance (``inf``).
    """
    ps = as_pointset(points)
    rho = np.asarray(rho)
    rank = priority_ranks(rho)
    tree = PrioritySearchKdTree(ps.coords, rank, rho, grain, backend)
    noise = np.ascontiguousarray(rho < rho_min, dtype=np.uint8)
    return tree.kernels.priority_dependent(tree, ps.coords, rank, noise,
                                           get_num_threads())
