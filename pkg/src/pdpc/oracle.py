"""Quadratic brute-force reference for every queryable quantity.

Written directly from the definitions with numpy and no spatial index.
Squared distances are accumulated dimension by dimension in the same order
as the kernels, so results compare exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import BoundingBox, PriorityKey, as_pointset, priority_gt, priority_ranks

_BLOCK = 1 << 22  # matrix entries per chunk


def _sq_block(A, B):
    acc = np.zeros((A.shape[0], B.shape[0]))
    for k in range(A.shape[1]):
        t = A[:, k][:, None] - B[:, k][None, :]
        acc += t * t
    return acc


def _chunks(n, width):
    step = max(1, _BLOCK // max(width, 1))
    for s in range(0, n, step):
        yield s, min(n, s + step)


def oracle_densities(points, d_cut: float) -> np.ndarray:
    """Closed-ball neighbor counts, self included."""
    X = as_pointset(points).coords
    r2 = d_cut * d_cut
    out = np.empty(X.shape[0], dtype=np.int64)
    for s, e in _chunks(X.shape[0], X.shape[0]):
        out[s:e] = np.count_nonzero(_sq_block(X[s:e], X) <= r2, axis=1)
    return out


def _dependent_arrays(coords, rank, noise):
    n = coords.shape[0]
    dep = np.full(n, -1, dtype=np.int64)
    sq = np.full(n, np.inf)
    live = np.flatnonzero(~np.asarray(noise, dtype=bool))
    for s, e in _chunks(len(live), n):
        rows = live[s:e]
        D = _sq_block(coords[rows], coords)
        D[rank[None, :] >= rank[rows][:, None]] = np.inf
        # argmin takes the first minimum, i.e. the smallest index on ties
        j = np.argmin(D, axis=1)
        best = D[np.arange(len(rows)), j]
        has = np.isfinite(best)
        dep[rows[has]] = j[has]
        sq[rows[has]] = best[has]
    return dep, sq


def oracle_dependent(points, rho, rho_min):
    """``(dependent, sqdist)`` by scanning every higher-priority point."""
    X = as_pointset(points).coords
    rho = np.asarray(rho)
    return _dependent_arrays(X, priority_ranks(rho), rho < rho_min)


def oracle_dependent_slow(points, rho, rho_min):
    """Pure-Python double loop over keys; for tiny inputs only."""
    ps = as_pointset(points)
    n = ps.n
    keys = [PriorityKey(float(rho[i]), i + 1) for i in range(n)]
    dep = [None] * n
    delta = [math.inf] * n
    for i in range(n):
        if rho[i] < rho_min:
            continue
        best = None
        for j in range(n):
            if not priority_gt(keys[j], keys[i]):
                continue
            diff = ps.coords[i] - ps.coords[j]
            d2 = 0.0
            for t in diff.tolist():
                d2 += t * t
            if best is None or (d2, j) < best:
                best = (d2, j)
        if best is not None:
            dep[i] = best[1]
            delta[i] = math.sqrt(best[0])
    return dep, delta


def oracle_priority_range(points, gamma, box_q: BoundingBox,
                          gamma_q: PriorityKey) -> set[int]:
    """1-based ids inside ``box_q`` (closed bounds) whose key beats ``gamma_q``."""
    X = as_pointset(points).coords
    out = set()
    for i in range(X.shape[0]):
        key = PriorityKey(float(gamma[i]), i + 1)
        if priority_gt(key, gamma_q) and box_q.contains(X[i]):
            out.add(i + 1)
    return out


def oracle_labels(rho, dependent, delta, rho_min, delta_min) -> np.ndarray:
    """Cluster labels by following dependent links up to a center.

    Label = 1-based id of the smallest member of the cluster; noise = -1.
    """
    n = len(rho)
    center_of = np.full(n, -2, dtype=np.int64)
    for i in range(n):
        if rho[i] < rho_min:
            center_of[i] = -1
            continue
        path = []
        j = i
        while center_of[j] == -2 and delta[j] < delta_min:
            path.append(j)
            j = int(dependent[j])
        c = j if center_of[j] == -2 else center_of[j]
        center_of[j] = c
        for p in path:
            center_of[p] = c
    labels = np.full(n, -1, dtype=np.int64)
    smallest = {}
    for i in range(n):
        c = center_of[i]
        if c >= 0 and c not in smallest:
            smallest[c] = i
    for i in range(n):
        if center_of[i] >= 0:
            labels[i] = smallest[center_of[i]] + 1
    return labels
