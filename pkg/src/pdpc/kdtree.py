"""Balanced, immutable kd-tree with pruned range counting and exact NN.

Nodes live in preallocated flat arrays in preorder: the left child of node
``v`` is ``v + 1`` and the right child is ``v + 1 + count_nodes(left)``, so
every subtree occupies a contiguous, precomputable block and subtrees can be
built independently. Several trees may share one set of arrays (a forest);
the Fenwick finder stores its ``n`` trees that way.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from . import _backend
from ._config import get_num_threads
from .geometry import UsageError, as_pointset

LEAF_CAP = 16
GRAIN = 1024


@functools.lru_cache(maxsize=None)
def count_nodes(m: int, leaf_cap: int) -> int:
    """Number of nodes in a tree over ``m`` points."""
    if m <= leaf_cap:
        return 1
    return 1 + count_nodes((m + 1) // 2, leaf_cap) + count_nodes(m // 2, leaf_cap)


class KdTree:
    """One kd-tree, or a forest of kd-trees sharing flat storage.

    Attributes
    ----------
    pts, idx : ndarray
        Slot coordinates and the original 0-based point index per slot.
    lo, hi : ndarray
        Tight bounding box of every node.
    start, end : ndarray
        Slot range covered by every node.
    left, right, parent : ndarray
        Node links; ``-1`` marks a missing link (leaves have no children).
    slot_off, sizes, node_off : ndarray
        Per-tree slot offset, point count and root node.
    """

    def __init__(self, coords, segments, leaf_cap=LEAF_CAP, grain=GRAIN,
                 backend=None):
        coords = np.ascontiguousarray(coords, dtype=np.float64)
        if leaf_cap < 1:
            raise UsageError("leaf_cap must be >= 1")
        sizes = np.array([len(s) for s in segments], dtype=np.int64)
        if len(sizes) == 0 or (sizes < 1).any():
            raise UsageError("every tree needs at least one point")
        self.kernels = _backend.get(backend)
        self.leaf_cap = int(leaf_cap)
        self.sizes = sizes
        self.slot_off = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
        nodes = np.array([count_nodes(int(m), self.leaf_cap) for m in sizes],
                         dtype=np.int64)
        self.node_off = np.concatenate(([0], np.cumsum(nodes)[:-1])).astype(np.int64)
        n_nodes = int(nodes.sum())
        d = coords.shape[1]

        self.idx = np.ascontiguousarray(np.concatenate(segments), dtype=np.int64)
        self.pts = np.ascontiguousarray(coords[self.idx])
        self.lo = np.empty((n_nodes, d))
        self.hi = np.empty((n_nodes, d))
        self.start = np.empty(n_nodes, dtype=np.int64)
        self.end = np.empty(n_nodes, dtype=np.int64)
        self.left = np.empty(n_nodes, dtype=np.int64)
        self.right = np.empty(n_nodes, dtype=np.int64)
        self.parent = np.empty(n_nodes, dtype=np.int64)
        self.split_dim = np.empty(n_nodes, dtype=np.int64)
        self.split_val = np.empty(n_nodes)
        self.kernels.build_kd_forest(self, self.leaf_cap, int(grain),
                                     get_num_threads())

    @classmethod
    def build(cls, points, leaf_cap=LEAF_CAP, grain=GRAIN, backend=None):
        """Build a single tree over all points of ``points``."""
        ps = as_pointset(points)
        return cls(ps.coords, [np.arange(ps.n, dtype=np.int64)], leaf_cap,
                   grain, backend)

    # ----------------------------------------------------------- structure

    @property
    def d(self) -> int:
        return self.pts.shape[1]

    @property
    def n_trees(self) -> int:
        return len(self.sizes)

    @property
    def n_nodes(self) -> int:
        return self.lo.shape[0]

    def root(self, tree: int = 0) -> int:
        return int(self.node_off[tree])

    def is_leaf(self, v: int) -> bool:
        return self.left[v] < 0

    def depth(self, tree: int = 0) -> int:
        best = 0
        stack = [(self.root(tree), 0)]
        while stack:
            v, dep = stack.pop()
            best = max(best, dep)
            if self.left[v] >= 0:
                stack.append((int(self.left[v]), dep + 1))
                stack.append((int(self.right[v]), dep + 1))
        return best

    def leaf_of_slots(self) -> np.ndarray:
        """Leaf node owning every slot."""
        leaves = np.flatnonzero(self.left < 0)
        leaves = leaves[np.argsort(self.start[leaves], kind="stable")]
        return np.repeat(leaves, self.end[leaves] - self.start[leaves]).astype(np.int64)

    # ------------------------------------------------------------- queries

    def _queries(self, q):
        q = np.ascontiguousarray(q, dtype=np.float64)
        if q.ndim == 1:
            q = q.reshape(1, -1)
        if q.shape[1] != self.d:
            raise UsageError(f"query dimension {q.shape[1]} != tree dimension {self.d}")
        return q

    def range_count_many(self, centers, r, prune=True, tree=0):
        """Count points within ``r`` of each center.

        Returns ``(counts, visits)`` where ``visits`` is the number of
        nodes each traversal examined.
        """
        if r < 0:
            raise UsageError("radius must be >= 0")
        q = self._queries(centers)
        return self.kernels.kd_range_count(self, self.root(tree), q, float(r),
                                           bool(prune), get_num_threads())

    def query_range_count(self, center, r, prune=True, tree=0) -> int:
        return int(self.range_count_many(center, r, prune, tree)[0][0])

    def nn_many(self, queries, exclude=None, tree=0):
        """Nearest stored point for each query.

        ``exclude`` holds a 0-based index per query (``-1`` for none).
        Returns ``(index, squared_distance, visits)``; index ``-1`` when
        every point was excluded.
        """
        q = self._queries(queries)
        if exclude is None:
            exclude = np.full(q.shape[0], -1, dtype=np.int64)
        exclude = np.ascontiguousarray(exclude, dtype=np.int64)
        return self.kernels.kd_nn(self, self.root(tree), q, exclude,
                                  get_num_threads())

    def query_nn(self, q, exclude_id=None, tree=0):
        """Nearest point to ``q`` as ``(id, distance)``; ``None`` if empty.

        Ids are 1-based; distance ties go to the smaller id.
        """
        ex = -1 if exclude_id is None else int(exclude_id) - 1
        i, sq, _ = self.nn_many(q, np.array([ex]), tree)
        if i[0] < 0:
            return None
        return int(i[0]) + 1, math.sqrt(sq[0])


def build_kdtree(points, leaf_cap=LEAF_CAP, grain=GRAIN, backend=None) -> KdTree:
    return KdTree.build(points, leaf_cap, grain, backend)


def query_range_count(tree: KdTree, center, r: float, prune=True) -> int:
    return tree.query_range_count(center, r, prune)


def query_nn(tree: KdTree, q, exclude_id=None):
    return tree.query_nn(q, exclude_id)
