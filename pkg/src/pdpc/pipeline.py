"""End-to-end density peaks clustering.

Step 1 counts neighbors within ``d_cut`` on one shared kd-tree, step 2
finds every point's dependent point with a selectable strategy, and step 3
unions each non-noise, non-center point with its dependent point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._config import get_num_threads, num_threads
from .fenwick import fenwick_dependent_point
from .geometry import DpcParams, UsageError, as_pointset, priority_ranks
from .incomplete import incomplete_dependent_point
from .kdtree import KdTree
from .priority import priority_dependent_point
from .unionfind import UnionFind

NOISE = -1
STRATEGIES = ("priority", "fenwick", "incomplete", "bruteforce")


@dataclass
class DpcResult:
    """Per-point outputs, all indexed by 0-based point index.

    ``dependent`` holds 0-based indices (``-1`` = none) and ``delta`` the
    dependent distance (``inf`` where undefined). ``labels`` use the
    1-based id of the smallest cluster member, ``NOISE`` (-1) for noise.
    ``centers`` are 1-based ids in increasing order.
    """

    rho: np.ndarray
    dependent: np.ndarray
    delta: np.ndarray
    labels: np.ndarray
    centers: list[int]
    params: DpcParams | None = None
    strategy: str = ""
    threads: int = 0
    timings: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.rho)

    @property
    def lambda_ids(self) -> list:
        return [None if j < 0 else int(j) + 1 for j in self.dependent]

    @property
    def n_clusters(self) -> int:
        return len(self.centers)

    @property
    def n_noise(self) -> int:
        return int(np.count_nonzero(self.labels == NOISE))


def compute_densities(points, d_cut: float, backend=None, tree: KdTree | None = None,
                      timings: dict | None = None) -> np.ndarray:
    """Number of points within ``d_cut`` of each point (self included)."""
    if not d_cut > 0:
        raise UsageError("d_cut must be > 0")
    ps = as_pointset(points)
    t0 = time.perf_counter()
    if tree is None:
        tree = KdTree.build(ps, backend=backend)
    t1 = time.perf_counter()
    counts, _ = tree.range_count_many(ps.coords, d_cut, prune=True)
    t2 = time.perf_counter()
    if timings is not None:
        timings["build"] = t1 - t0
        timings["density"] = t2 - t1
    return counts


def _bruteforce(points, rho, rho_min, backend=None):
    ps = as_pointset(points)
    rho = np.asarray(rho)
    noise = np.ascontiguousarray(rho < rho_min, dtype=np.uint8)
    return _backend.get(backend).brute_dependent(
        ps.coords, priority_ranks(rho), noise, get_num_threads())


_FINDERS = {
    "priority": priority_dependent_point,
    "fenwick": fenwick_dependent_point,
    "incomplete": incomplete_dependent_point,
    "bruteforce": _bruteforce,
}


def find_dependent_points(points, rho, rho_min, strategy="priority", backend=None):
    """``(dependent, delta)``: 0-based dependent index and distance per point."""
    try:
        finder = _FINDERS[strategy]
    except KeyError:
        raise UsageError(f"unknown strategy {strategy!r}; "
                         f"choose from {', '.join(STRATEGIES)}") from None
    rho = np.asarray(rho)
    if rho.shape != (as_pointset(points).n,):
        raise UsageError("need one density per point")
    dep, sq = finder(points, rho, rho_min, backend=backend)
    return dep, np.sqrt(sq)


def single_linkage_cluster(points, rho, dependent, delta, params: DpcParams,
                           backend=None):
    """Labels and centers from dependent links.

    Noise points are labeled ``NOISE`` and never unioned; a non-noise point
    joins its dependent point's cluster when ``delta < delta_min``.
    """
    rho = np.asarray(rho)
    dependent = np.asarray(dependent, dtype=np.int64)
    delta = np.asarray(delta, dtype=np.float64)
    n = len(rho)
    noise = rho < params.rho_min
    joins = ~noise & (delta < params.delta_min)
    if (dependent[joins] < 0).any():
        raise UsageError("finite delta without a dependent point")
    uf = UnionFind(n, backend)
    src = np.flatnonzero(joins)
    uf.union_pairs(src, dependent[src])
    labels = uf.roots() + 1
    labels[noise] = NOISE
    centers = (np.flatnonzero(~noise & (delta >= params.delta_min)) + 1).tolist()
    return labels, centers


def run_dpc(points, params: DpcParams, strategy="priority", threads=None,
            backend=None) -> DpcResult:
    """Run all three steps; the result does not depend on ``threads``."""
    ps = as_pointset(points)
    if strategy not in _FINDERS:
        raise UsageError(f"unknown strategy {strategy!r}")
    nt = get_num_threads() if threads is None else threads
    timings = {}
    with num_threads(nt):
        rho = compute_densities(ps, params.d_cut, backend, timings=timings)
        t0 = time.perf_counter()
        dep, delta = find_dependent_points(ps, rho, params.rho_min, strategy, backend)
        t1 = time.perf_counter()
        labels, centers = single_linkage_cluster(ps, rho, dep, delta, params, backend)
        t2 = time.perf_counter()
        used = get_num_threads()
    timings["dependent"] = t1 - t0
    timings["linkage"] = t2 - t1
    return DpcResult(rho, dep, delta, labels, centers, params, strategy, used, timings)
