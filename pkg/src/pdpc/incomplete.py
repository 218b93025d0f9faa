"""Sequential dependent-point finder over a pre-built kd-tree.

All points are placed in a balanced tree up front and start inactive.
Points are then visited in descending priority: each one queries the
nearest active point and is activated afterwards, which sets the active
flag on its leaf-to-root path. Inactive subtrees are skipped by queries.
"""

from __future__ import annotations

import math

import numpy as np

from . import _pykernels
from .geometry import as_pointset, priority_order
from .kdtree import GRAIN, LEAF_CAP, KdTree


class IncompleteKdTree:
    def __init__(self, points, leaf_cap=LEAF_CAP, grain=GRAIN, backend=None):
        self.points = as_pointset(points)
        self.base = KdTree.build(self.points, leaf_cap, grain, backend)
        self.is_active = np.zeros(self.base.n_nodes, dtype=np.uint8)
        self.slot_active = np.zeros(self.points.n, dtype=np.uint8)
        self.slot_of = np.empty(self.points.n, dtype=np.int64)
        self.slot_of[self.base.idx] = np.arange(self.points.n, dtype=np.int64)
        self.leaf_of = self.base.leaf_of_slots()

    def activate(self, pid: int) -> int:
        """Activate point ``pid`` (1-based); return how many node flags flipped."""
        s = self.slot_of[pid - 1]
        self.slot_active[s] = 1
        flipped = 0
        v = int(self.leaf_of[s])
        # an active node implies active ancestors
        while v >= 0 and not self.is_active[v]:
            self.is_active[v] = 1
            flipped += 1
            v = int(self.base.parent[v])
        return flipped

    def query_active_nn(self, q):
        """Nearest active point as ``(id, distance)``, ``None`` if none active."""
        q = np.asarray(q, dtype=np.float64)
        i, sq, _ = _pykernels._kd_nn_one(self.base, 0, q, -1,
                                        self.is_active, self.slot_active)
        if i < 0:
            return None
        return i + 1, math.sqrt(sq)


def incomplete_dependent_point(points, rho, rho_min, backend=None,
                               leaf_cap=LEAF_CAP, grain=GRAIN):
    """Returns ``(dependent, sqdist)`` like the other finders.

    Noise points skip their own query but are still activated; a noise
    point can never be the nearest higher-priority point of a non-noise
    point's query because every candidate it competes against outranks it.
    """
    ps = as_pointset(points)
    rho = np.asarray(rho)
    tree = KdTree.build(ps, leaf_cap, grain, backend)
    order = priority_order(rho)
    noise = np.ascontiguousarray(rho < rho_min, dtype=np.uint8)
    slot_of = np.empty(ps.n, dtype=np.int64)
    slot_of[tree.idx] = np.arange(ps.n, dtype=np.int64)
    return tree.kernels.incomplete_dependent(tree, ps.coords, order, noise,
                                             slot_of, tree.leaf_of_slots())
