"""Pure-Python/numpy kernels.

Same signatures and results as the compiled ``_kernels`` module; selected
when the extension is unavailable or ``PDPC_PURE_PYTHON=1`` is set. The
``nthreads`` and ``grain`` arguments are accepted and ignored: this backend
is sequential.

Tree layouts
------------
kd forest (one or many trees sharing flat arrays)
    ``pts``/``idx`` hold slot coordinates and original point indices;
    ``lo``/``hi``/``start``/``end``/``left``/``right``/``parent`` are node
    records in preorder (left child = node + 1). Leaves have ``left == -1``.
priority tree
    node ``v`` stores the point in slot ``v`` and covers slots
    ``[v, end[v])``; ``rank[v]`` is the stored point's priority rank.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"
INF = math.inf


def _sq_rows(P, q):
    acc = np.zeros(P.shape[0])
    for k in range(P.shape[1]):
        t = P[:, k] - q[k]
        acc += t * t
    return acc


def _sq(a, b):
    acc = 0.0
    for x, y in zip(a, b):
        t = x - y
        acc += t * t
    return acc


def _box_sq(lo, hi, q):
    acc = 0.0
    for l, h, x in zip(lo, hi, q):
        if x < l:
            t = l - x
        elif x > h:
            t = x - h
        else:
            continue
        acc += t * t
    return acc


def _far_sq(lo, hi, q):
    acc = 0.0
    for l, h, x in zip(lo, hi, q):
        a = l - x
        b = h - x
        a *= a
        b *= b
        acc += a if a > b else b
    return acc


def _widest(lo, hi):
    ext = hi - lo
    return int(np.argmax(ext))


def _median_split(pts, idx, s, e, dim, nl):
    """Order slots [s, e) by (coord, index); first ``nl`` go left."""
    order = np.lexsort((idx[s:e], pts[s:e, dim]))
    pts[s:e] = pts[s:e][order]
    idx[s:e] = idx[s:e][order]
    return float(pts[s + nl - 1, dim])


# --------------------------------------------------------------- kd forest


def build_kd_forest(t, leaf_cap, grain, nthreads):
    from .kdtree import count_nodes

    pts, idx = t.pts, t.idx
    for tr in range(len(t.sizes)):
        stack = [(int(t.node_off[tr]), int(t.slot_off[tr]),
                  int(t.slot_off[tr] + t.sizes[tr]), -1)]
        while stack:
            v, s, e, par = stack.pop()
            t.start[v], t.end[v], t.parent[v] = s, e, par
            t.lo[v] = pts[s:e].min(axis=0)
            t.hi[v] = pts[s:e].max(axis=0)
            m = e - s
            if m <= leaf_cap:
                t.left[v] = t.right[v] = -1
                t.split_dim[v] = -1
                t.split_val[v] = np.nan
                continue
            dim = _widest(t.lo[v], t.hi[v])
            nl = (m + 1) // 2
            t.split_dim[v] = dim
            t.split_val[v] = _median_split(pts, idx, s, e, dim, nl)
            lc = v + 1
            rc = v + 1 + count_nodes(nl, leaf_cap)
            t.left[v], t.right[v] = lc, rc
            stack.append((rc, s + nl, e, v))
            stack.append((lc, s, s + nl, v))


def _kd_nn_one(t, root, q, exclude, node_active=None, slot_active=None):
    best_i, best_sq, visits = -1, INF, 0
    lo, hi, left, right = t.lo, t.hi, t.left, t.right
    if node_active is not None and not node_active[root]:
        return -1, INF, 0
    stack = [(root, _box_sq(lo[root], hi[root], q))]
    while stack:
        v, bd = stack.pop()
        if bd > best_sq:
            continue
        visits += 1
        lc = left[v]
        if lc < 0:
            s, e = t.start[v], t.end[v]
            sq = _sq_rows(t.pts[s:e], q)
            for k in range(e - s):
                if slot_active is not None and not slot_active[s + k]:
                    continue
                i = int(t.idx[s + k])
                if i == exclude:
                    continue
                d2 = sq[k]
                if d2 < best_sq or (d2 == best_sq and i < best_i):
                    best_sq, best_i = float(d2), i
            continue
        rc = right[v]
        kids = []
        for c in (lc, rc):
            if node_active is None or node_active[c]:
                kids.append((c, _box_sq(lo[c], hi[c], q)))
        if len(kids) == 2 and kids[1][1] < kids[0][1]:
            kids.reverse()
        # nearer child popped first
        for c, cd in reversed(kids):
            stack.append((c, cd))
    return best_i, best_sq, visits


def kd_nn(t, root, queries, exclude, nthreads):
    nq = queries.shape[0]
    out_i = np.full(nq, -1, dtype=np.int64)
    out_sq = np.full(nq, INF)
    visits = np.zeros(nq, dtype=np.int64)
    for k in range(nq):
        out_i[k], out_sq[k], visits[k] = _kd_nn_one(
            t, int(root), queries[k], int(exclude[k]))
    return out_i, out_sq, visits


def kd_range_count(t, root, queries, r, prune, nthreads):
    r2 = r * r
    nq = queries.shape[0]
    counts = np.zeros(nq, dtype=np.int64)
    visits = np.zeros(nq, dtype=np.int64)
    lo, hi, left, right = t.lo, t.hi, t.left, t.right
    for k in range(nq):
        q = queries[k]
        c = vis = 0
        stack = [int(root)]
        while stack:
            v = stack.pop()
            vis += 1
            if _box_sq(lo[v], hi[v], q) > r2:
                continue
            if prune and _far_sq(lo[v], hi[v], q) <= r2:
                c += int(t.end[v] - t.start[v])
                continue
            if left[v] < 0:
                sq = _sq_rows(t.pts[t.start[v]:t.end[v]], q)
                c += int(np.count_nonzero(sq <= r2))
            else:
                stack.append(int(right[v]))
                stack.append(int(left[v]))
        counts[k], visits[k] = c, vis
    return counts, visits


# ----------------------------------------------------------- priority tree


def build_priority(t, grain, nthreads):
    pts, idx, rank = t.pts, t.idx, t.rank
    n = pts.shape[0]
    stack = [(0, n)]
    while stack:
        v, e = stack.pop()
        best = v + int(np.argmin(rank[v:e]))
        if best != v:
            pts[[v, best]] = pts[[best, v]]
            idx[[v, best]] = idx[[best, v]]
            rank[[v, best]] = rank[[best, v]]
        t.end[v] = e
        t.lo[v] = pts[v:e].min(axis=0)
        t.hi[v] = pts[v:e].max(axis=0)
        m = e - v - 1
        t.left[v] = t.right[v] = -1
        t.split_dim[v] = -1
        t.split_val[v] = np.nan
        if m <= 0:
            continue
        dim = _widest(t.lo[v], t.hi[v])
        nl = (m + 1) // 2
        s = v + 1
        order = np.lexsort((idx[s:e], pts[s:e, dim]))
        pts[s:e] = pts[s:e][order]
        idx[s:e] = idx[s:e][order]
        rank[s:e] = rank[s:e][order]
        t.split_dim[v] = dim
        t.split_val[v] = pts[s + nl - 1, dim]
        t.left[v] = s
        stack.append((s, s + nl))
        if m - nl > 0:
            t.right[v] = s + nl
            stack.append((s + nl, e))


def _priority_nn_one(t, q, qrank):
    best_i, best_sq, visits = -1, INF, 0
    if t.rank[0] >= qrank:
        return -1, INF, 0
    lo, hi, left, right, rank = t.lo, t.hi, t.left, t.right, t.rank
    stack = [(0, _box_sq(lo[0], hi[0], q))]
    while stack:
        v, bd = stack.pop()
        if bd > best_sq:
            continue
        visits += 1
        d2 = _sq(t.pts[v], q)
        i = int(t.idx[v])
        if d2 < best_sq or (d2 == best_sq and i < best_i):
            best_sq, best_i = d2, i
        kids = []
        for c in (left[v], right[v]):
            if c >= 0 and rank[c] < qrank:
                kids.append((int(c), _box_sq(lo[c], hi[c], q)))
        if len(kids) == 2 and kids[1][1] < kids[0][1]:
            kids.reverse()
        for c, cd in reversed(kids):
            stack.append((c, cd))
    return best_i, best_sq, visits


def priority_nn(t, queries, qrank, nthreads):
    nq = queries.shape[0]
    out_i = np.full(nq, -1, dtype=np.int64)
    out_sq = np.full(nq, INF)
    visits = np.zeros(nq, dtype=np.int64)
    for k in range(nq):
        out_i[k], out_sq[k], visits[k] = _priority_nn_one(
            t, queries[k], int(qrank[k]))
    return out_i, out_sq, visits


def priority_dependent(t, coords, rank, noise, nthreads):
    n = coords.shape[0]
    dep = np.full(n, -1, dtype=np.int64)
    sq = np.full(n, INF)
    for i in range(n):
        if noise[i]:
            continue
        dep[i], sq[i], _ = _priority_nn_one(t, coords[i], int(rank[i]))
    return dep, sq


# -------------------------------------------------------- dependent finders


def incomplete_dependent(t, coords, order, noise, slot_of, leaf_of):
    n = coords.shape[0]
    node_active = np.zeros(t.lo.shape[0], dtype=np.uint8)
    slot_active = np.zeros(t.pts.shape[0], dtype=np.uint8)
    dep = np.full(n, -1, dtype=np.int64)
    sq = np.full(n, INF)
    for i in order:
        i = int(i)
        if not noise[i]:
            dep[i], sq[i], _ = _kd_nn_one(t, 0, coords[i], -1,
                                          node_active, slot_active)
        s = slot_of[i]
        slot_active[s] = 1
        v = leaf_of[s]
        while v >= 0 and not node_active[v]:
            node_active[v] = 1
            v = t.parent[v]
    return dep, sq


def fenwick_dependent(f, coords, order, noise, nthreads):
    n = coords.shape[0]
    dep = np.full(n, -1, dtype=np.int64)
    sq = np.full(n, INF)
    for pos in range(1, n):
        i = int(order[pos])
        if noise[i]:
            continue
        dep[i], sq[i] = fenwick_query_one(f, pos, coords[i])
    return dep, sq


def fenwick_query_one(f, bound, q):
    best_i, best_sq = -1, INF
    j = bound
    while j > 0:
        ci, csq, _ = _kd_nn_one(f, int(f.node_off[j - 1]), q, -1)
        if csq < best_sq or (csq == best_sq and ci < best_i):
            best_i, best_sq = ci, csq
        j -= j & -j
    return best_i, best_sq


# -------------------------------------------------------------- brute force


def brute_density(coords, r, nthreads):
    from .oracle import oracle_densities
    return oracle_densities(coords, r)


def brute_dependent(coords, rank, noise, nthreads):
    from .oracle import _dependent_arrays
    return _dependent_arrays(coords, rank, noise)


# -------------------------------------------------------------- union-find


def _find(parent, a):
    while True:
        p = parent[a]
        if p == a:
            return a
        gp = parent[p]
        parent[a] = gp
        a = p


def uf_unite(parent, a, b, nthreads):
    for x, y in zip(a.tolist(), b.tolist()):
        while True:
            rx, ry = _find(parent, x), _find(parent, y)
            if rx == ry:
                break
            if rx < ry:
                rx, ry = ry, rx
            if parent[rx] == rx:
                parent[rx] = ry
                break


def uf_find_all(parent, nthreads):
    out = np.empty(parent.shape[0], dtype=np.int64)
    for i in range(parent.shape[0]):
        out[i] = _find(parent, i)
    return out
