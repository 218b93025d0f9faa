# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False, nonecheck=False
"""Compiled kernels (OpenMP).

Mirror of ``_pykernels``: identical signatures, array layouts and results.
Floating point: squared distances are accumulated in dimension order and
the extension is compiled without FMA contraction, so every comparison
matches the numpy oracle bit for bit.
"""

from cython.parallel cimport prange
from libc.math cimport INFINITY, NAN
from libc.stdint cimport int64_t, uint8_t
from libc.stdlib cimport malloc, free

import numpy as np

NAME = "compiled"

cdef extern from *:
    """
    #include <stdint.h>
    static inline int pdpc_cas64(int64_t *p, int64_t expected, int64_t desired) {
        return __atomic_compare_exchange_n(p, &expected, desired, 0,
                                           __ATOMIC_SEQ_CST, __ATOMIC_SEQ_CST);
    }
    static inline int64_t pdpc_load64(int64_t *p) {
        return __atomic_load_n(p, __ATOMIC_ACQUIRE);
    }
    """
    int pdpc_cas64(int64_t *p, int64_t expected, int64_t desired) nogil
    int64_t pdpc_load64(int64_t *p) nogil

cdef enum:
    STACK_CAP = 512

cdef struct Kd:
    double *pts
    int64_t *idx
    double *lo
    double *hi
    int64_t *start
    int64_t *end
    int64_t *left
    int64_t *right
    int64_t *parent
    int64_t *split_dim
    double *split_val
    int64_t *rank      # priority tree only
    int d
    int64_t leaf_cap


cdef Kd _kd_view(t, bint priority=False):
    cdef Kd k
    cdef double[:, ::1] pts = t.pts
    cdef int64_t[::1] idx = t.idx
    cdef double[:, ::1] lo = t.lo
    cdef double[:, ::1] hi = t.hi
    cdef int64_t[::1] end = t.end
    cdef int64_t[::1] left = t.left
    cdef int64_t[::1] right = t.right
    cdef int64_t[::1] split_dim = t.split_dim
    cdef double[::1] split_val = t.split_val
    cdef int64_t[::1] start, parent, rank
    k.pts = &pts[0, 0]
    k.idx = &idx[0]
    k.lo = &lo[0, 0]
    k.hi = &hi[0, 0]
    k.end = &end[0]
    k.left = &left[0]
    k.right = &right[0]
    k.split_dim = &split_dim[0]
    k.split_val = &split_val[0]
    k.d = pts.shape[1]
    k.start = NULL
    k.parent = NULL
    k.rank = NULL
    k.leaf_cap = 0
    if priority:
        rank = t.rank
        k.rank = &rank[0]
    else:
        start = t.start
        parent = t.parent
        k.start = &start[0]
        k.parent = &parent[0]
    return k


# ------------------------------------------------------------- geometry

cdef inline double sq_dist(const double *a, const double *b, int d) noexcept nogil:
    cdef double acc = 0.0, t
    cdef int k
    for k in range(d):
        t = a[k] - b[k]
        acc += t * t
    return acc


cdef inline double box_sq(const double *lo, const double *hi, const double *q,
                          int d) noexcept nogil:
    cdef double acc = 0.0, t
    cdef int k
    for k in range(d):
        if q[k] < lo[k]:
            t = lo[k] - q[k]
        elif q[k] > hi[k]:
            t = q[k] - hi[k]
        else:
            continue
        acc += t * t
    return acc


cdef inline double far_sq(const double *lo, const double *hi, const double *q,
                          int d) noexcept nogil:
    cdef double acc = 0.0, a, b
    cdef int k
    for k in range(d):
        a = lo[k] - q[k]
        b = hi[k] - q[k]
        a = a * a
        b = b * b
        acc += a if a > b else b
    return acc


cdef inline void tight_box(const double *pts, int64_t s, int64_t e, int d,
                           double *lo, double *hi) noexcept nogil:
    cdef int64_t i
    cdef int k
    cdef double x
    for k in range(d):
        lo[k] = pts[s * d + k]
        hi[k] = pts[s * d + k]
    for i in range(s + 1, e):
        for k in range(d):
            x = pts[i * d + k]
            if x < lo[k]:
                lo[k] = x
            if x > hi[k]:
                hi[k] = x


cdef inline int widest(const double *lo, const double *hi, int d) noexcept nogil:
    cdef int k, best = 0
    cdef double w, bw = hi[0] - lo[0]
    for k in range(1, d):
        w = hi[k] - lo[k]
        if w > bw:
            bw = w
            best = k
    return best


cdef inline void swap_slots(double *pts, int64_t *idx, int64_t *rank,
                            int64_t a, int64_t b, int d) noexcept nogil:
    cdef int k
    cdef double x
    cdef int64_t y
    if a == b:
        return
    for k in range(d):
        x = pts[a * d + k]
        pts[a * d + k] = pts[b * d + k]
        pts[b * d + k] = x
    y = idx[a]
    idx[a] = idx[b]
    idx[b] = y
    if rank != NULL:
        y = rank[a]
        rank[a] = rank[b]
        rank[b] = y


cdef inline bint key_lt(double xa, int64_t ia, double xb, int64_t ib) noexcept nogil:
    return xa < xb or (xa == xb and ia < ib)


cdef void select_kth(double *pts, int64_t *idx, int64_t *rank, int64_t s,
                     int64_t e, int dim, int64_t target, int d) noexcept nogil:
    """Rearrange [s, e) so slot ``target`` holds its order statistic under
    (coordinate, index) and everything left of it is smaller."""
    cdef int64_t lo = s, hi = e - 1, mid, i, j
    cdef double pv
    cdef int64_t pi
    while hi > lo:
        mid = lo + (hi - lo) // 2
        # median of three moved to mid
        if key_lt(pts[mid * d + dim], idx[mid], pts[lo * d + dim], idx[lo]):
            swap_slots(pts, idx, rank, mid, lo, d)
        if key_lt(pts[hi * d + dim], idx[hi], pts[lo * d + dim], idx[lo]):
            swap_slots(pts, idx, rank, hi, lo, d)
        if key_lt(pts[hi * d + dim], idx[hi], pts[mid * d + dim], idx[mid]):
            swap_slots(pts, idx, rank, hi, mid, d)
        pv = pts[mid * d + dim]
        pi = idx[mid]
        i = lo
        j = hi
        while i <= j:
            while key_lt(pts[i * d + dim], idx[i], pv, pi):
                i += 1
            while key_lt(pv, pi, pts[j * d + dim], idx[j]):
                j -= 1
            if i <= j:
                swap_slots(pts, idx, rank, i, j, d)
                i += 1
                j -= 1
        if target <= j:
            hi = j
        elif target >= i:
            lo = i
        else:
            break


cdef int64_t count_nodes_c(int64_t m, int64_t cap) noexcept nogil:
    if m <= cap:
        return 1
    return 1 + count_nodes_c((m + 1) // 2, cap) + count_nodes_c(m // 2, cap)


# -------------------------------------------------------------- kd build

cdef int kd_split_node(Kd *t, int64_t v, int64_t s, int64_t e, int64_t par,
                       int64_t *child) noexcept nogil:
    """Fill node ``v``; return 0 for a leaf, else 2 with the two child
    (node, start, end) triples in ``child``."""
    cdef int d = t.d
    cdef int64_t m = e - s, nl
    cdef int dim
    t.start[v] = s
    t.end[v] = e
    t.parent[v] = par
    tight_box(t.pts, s, e, d, t.lo + v * d, t.hi + v * d)
    if m <= t.leaf_cap:
        t.left[v] = -1
        t.right[v] = -1
        t.split_dim[v] = -1
        t.split_val[v] = NAN
        return 0
    dim = widest(t.lo + v * d, t.hi + v * d, d)
    nl = (m + 1) // 2
    select_kth(t.pts, t.idx, NULL, s, e, dim, s + nl - 1, d)
    t.split_dim[v] = dim
    t.split_val[v] = t.pts[(s + nl - 1) * d + dim]
    child[0] = v + 1
    child[1] = s
    child[2] = s + nl
    child[3] = v + 1 + count_nodes_c(nl, t.leaf_cap)
    child[4] = s + nl
    child[5] = e
    t.left[v] = child[0]
    t.right[v] = child[3]
    return 2


cdef int kd_build_subtree(Kd *t, int64_t v, int64_t s, int64_t e,
                          int64_t par) noexcept nogil:
    cdef int64_t *stack = <int64_t *> malloc(4 * STACK_CAP * sizeof(int64_t))
    cdef int64_t child[6]
    cdef int top = 0
    if stack == NULL:
        return -1
    stack[0] = v; stack[1] = s; stack[2] = e; stack[3] = par
    top = 1
    while top > 0:
        top -= 1
        v = stack[4 * top]; s = stack[4 * top + 1]
        e = stack[4 * top + 2]; par = stack[4 * top + 3]
        if kd_split_node(t, v, s, e, par, child) == 0:
            continue
        if top + 2 > STACK_CAP:
            free(stack)
            return -1
        stack[4 * top] = child[3]; stack[4 * top + 1] = child[4]
        stack[4 * top + 2] = child[5]; stack[4 * top + 3] = v
        top += 1
        stack[4 * top] = child[0]; stack[4 * top + 1] = child[1]
        stack[4 * top + 2] = child[2]; stack[4 * top + 3] = v
        top += 1
    free(stack)
    return 0


def build_kd_forest(t, int64_t leaf_cap, int64_t grain, int nthreads):
    """Build every tree of ``t`` in place.

    Level-synchronous: each round splits the frontier nodes in parallel;
    a frontier node at or below ``grain`` slots is finished sequentially
    inside its task.
    """
    cdef Kd k = _kd_view(t)
    cdef int64_t[:, ::1] scratch
    k.leaf_cap = leaf_cap
    cdef int64_t[::1] fv = np.ascontiguousarray(t.node_off, dtype=np.int64)
    cdef int64_t[::1] fs = np.ascontiguousarray(t.slot_off, dtype=np.int64)
    cdef int64_t[::1] fe = np.ascontiguousarray(
        np.asarray(t.slot_off) + np.asarray(t.sizes), dtype=np.int64)
    cdef int64_t[::1] fp = np.full(fv.shape[0], -1, dtype=np.int64)
    cdef int64_t[:, ::1] nxt
    cdef int64_t[::1] status
    cdef Py_ssize_t j, nf
    cdef int rc
    # largest trees first for load balance
    order = np.argsort(-(np.asarray(fe) - np.asarray(fs)), kind="stable")
    fv = np.asarray(fv)[order].copy()
    fs = np.asarray(fs)[order].copy()
    fe = np.asarray(fe)[order].copy()
    while fv.shape[0] > 0:
        nf = fv.shape[0]
        nxt = np.full((2 * nf, 4), -1, dtype=np.int64)
        scratch = np.zeros((nf, 6), dtype=np.int64)
        status = np.zeros(nf, dtype=np.int64)
        for j in prange(nf, nogil=True, schedule="dynamic", chunksize=1,
                        num_threads=nthreads):
            if fe[j] - fs[j] <= grain:
                status[j] = kd_build_subtree(&k, fv[j], fs[j], fe[j], fp[j])
            else:
                rc = kd_split_node(&k, fv[j], fs[j], fe[j], fp[j],
                                   &scratch[j, 0])
                if rc == 2:
                    nxt[2 * j, 0] = scratch[j, 0]
                    nxt[2 * j, 1] = scratch[j, 1]
                    nxt[2 * j, 2] = scratch[j, 2]
                    nxt[2 * j, 3] = fv[j]
                    nxt[2 * j + 1, 0] = scratch[j, 3]
                    nxt[2 * j + 1, 1] = scratch[j, 4]
                    nxt[2 * j + 1, 2] = scratch[j, 5]
                    nxt[2 * j + 1, 3] = fv[j]
        if np.any(np.asarray(status) != 0):
            raise MemoryError("kd-tree build stack exhausted")
        arr = np.asarray(nxt)
        arr = arr[arr[:, 0] >= 0]
        fv = arr[:, 0].copy()
        fs = arr[:, 1].copy()
        fe = arr[:, 2].copy()
        fp = arr[:, 3].copy()


# ------------------------------------------------------------- kd queries

cdef int64_t kd_nn_one(Kd *t, int64_t root, const double *q, int64_t exclude,
                       const uint8_t *node_active, const uint8_t *slot_active,
                       double *out_sq, int64_t *out_visits) noexcept nogil:
    cdef int d = t.d
    cdef int64_t stack_n[STACK_CAP]
    cdef double stack_d[STACK_CAP]
    cdef int top = 0
    cdef int64_t v, lc, rc, s, i, best_i = -1, visits = 0
    cdef double bd, dl = 0, dr = 0, d2, best_sq = INFINITY
    cdef bint have_l, have_r
    if node_active != NULL and not node_active[root]:
        out_sq[0] = INFINITY
        out_visits[0] = 0
        return -1
    stack_n[0] = root
    stack_d[0] = box_sq(t.lo + root * d, t.hi + root * d, q, d)
    top = 1
    while top > 0:
        top -= 1
        v = stack_n[top]
        bd = stack_d[top]
        if bd > best_sq:
            continue
        visits += 1
        lc = t.left[v]
        if lc < 0:
            for s in range(t.start[v], t.end[v]):
                if slot_active != NULL and not slot_active[s]:
                    continue
                i = t.idx[s]
                if i == exclude:
                    continue
                d2 = sq_dist(t.pts + s * d, q, d)
                if d2 < best_sq or (d2 == best_sq and i < best_i):
                    best_sq = d2
                    best_i = i
            continue
        rc = t.right[v]
        have_l = node_active == NULL or node_active[lc]
        have_r = node_active == NULL or node_active[rc]
        if have_l:
            dl = box_sq(t.lo + lc * d, t.hi + lc * d, q, d)
        if have_r:
            dr = box_sq(t.lo + rc * d, t.hi + rc * d, q, d)
        if top + 2 > STACK_CAP:
            best_i = -2
            break
        if have_l and have_r:
            if dr < dl:
                stack_n[top] = lc; stack_d[top] = dl; top += 1
                stack_n[top] = rc; stack_d[top] = dr; top += 1
            else:
                stack_n[top] = rc; stack_d[top] = dr; top += 1
                stack_n[top] = lc; stack_d[top] = dl; top += 1
        elif have_l:
            stack_n[top] = lc; stack_d[top] = dl; top += 1
        elif have_r:
            stack_n[top] = rc; stack_d[top] = dr; top += 1
    out_sq[0] = best_sq
    out_visits[0] = visits
    return best_i


def kd_nn(t, int64_t root, const double[:, ::1] queries, const int64_t[::1] exclude,
          int nthreads):
    cdef Kd k = _kd_view(t)
    cdef Py_ssize_t nq = queries.shape[0], j
    out_i_arr = np.full(nq, -1, dtype=np.int64)
    out_sq_arr = np.full(nq, np.inf)
    visits_arr = np.zeros(nq, dtype=np.int64)
    cdef int64_t[::1] out_i = out_i_arr
    cdef double[::1] out_sq = out_sq_arr
    cdef int64_t[::1] visits = visits_arr
    if nq == 0:
        return out_i_arr, out_sq_arr, visits_arr
    for j in prange(nq, nogil=True, schedule="dynamic", chunksize=64,
                    num_threads=nthreads):
        out_i[j] = kd_nn_one(&k, root, &queries[j, 0], exclude[j], NULL, NULL,
                             &out_sq[j], &visits[j])
    _check_stack(out_i_arr)
    return out_i_arr, out_sq_arr, visits_arr


cdef void kd_count_one(Kd *t, int64_t root, const double *q, double r2,
                       bint prune, int64_t *out_count,
                       int64_t *out_visits) noexcept nogil:
    cdef int d = t.d
    cdef int64_t stack_n[STACK_CAP]
    cdef int top = 1
    cdef int64_t v, s, c = 0, visits = 0
    stack_n[0] = root
    while top > 0:
        top -= 1
        v = stack_n[top]
        visits += 1
        if box_sq(t.lo + v * d, t.hi + v * d, q, d) > r2:
            continue
        if prune and far_sq(t.lo + v * d, t.hi + v * d, q, d) <= r2:
            c += t.end[v] - t.start[v]
            continue
        if t.left[v] < 0:
            for s in range(t.start[v], t.end[v]):
                if sq_dist(t.pts + s * d, q, d) <= r2:
                    c += 1
        else:
            if top + 2 > STACK_CAP:
                c = -1
                break
            stack_n[top] = t.right[v]
            stack_n[top + 1] = t.left[v]
            top += 2
    out_count[0] = c
    out_visits[0] = visits


def kd_range_count(t, int64_t root, const double[:, ::1] queries, double r,
                   bint prune, int nthreads):
    cdef Kd k = _kd_view(t)
    cdef Py_ssize_t nq = queries.shape[0], j
    cdef double r2 = r * r
    counts_arr = np.zeros(nq, dtype=np.int64)
    visits_arr = np.zeros(nq, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef int64_t[::1] visits = visits_arr
    if nq == 0:
        return counts_arr, visits_arr
    for j in prange(nq, nogil=True, schedule="dynamic", chunksize=64,
                    num_threads=nthreads):
        kd_count_one(&k, root, &queries[j, 0], r2, prune, &counts[j],
                     &visits[j])
    if (counts_arr < 0).any():
        raise RuntimeError("query stack exhausted")
    return counts_arr, visits_arr


def _check_stack(out_i):
    if (out_i == -2).any():
        raise RuntimeError("query stack exhausted")


# ---------------------------------------------------------- priority tree

cdef int pr_split_node(Kd *t, int64_t v, int64_t e, int64_t *child) noexcept nogil:
    cdef int d = t.d
    cdef int64_t i, best = v, m, nl, s
    cdef int dim, nkids = 0
    for i in range(v + 1, e):
        if t.rank[i] < t.rank[best]:
            best = i
    swap_slots(t.pts, t.idx, t.rank, v, best, d)
    t.end[v] = e
    tight_box(t.pts, v, e, d, t.lo + v * d, t.hi + v * d)
    t.left[v] = -1
    t.right[v] = -1
    t.split_dim[v] = -1
    t.split_val[v] = NAN
    m = e - v - 1
    if m <= 0:
        return 0
    dim = widest(t.lo + v * d, t.hi + v * d, d)
    nl = (m + 1) // 2
    s = v + 1
    select_kth(t.pts, t.idx, t.rank, s, e, dim, s + nl - 1, d)
    t.split_dim[v] = dim
    t.split_val[v] = t.pts[(s + nl - 1) * d + dim]
    t.left[v] = s
    child[0] = s
    child[1] = s + nl
    nkids = 1
    if m - nl > 0:
        t.right[v] = s + nl
        child[2] = s + nl
        child[3] = e
        nkids = 2
    return nkids


cdef int pr_build_subtree(Kd *t, int64_t v, int64_t e) noexcept nogil:
    cdef int64_t *stack = <int64_t *> malloc(2 * STACK_CAP * sizeof(int64_t))
    cdef int64_t child[4]
    cdef int top, nk
    if stack == NULL:
        return -1
    stack[0] = v
    stack[1] = e
    top = 1
    while top > 0:
        top -= 1
        v = stack[2 * top]
        e = stack[2 * top + 1]
        nk = pr_split_node(t, v, e, child)
        if top + 2 > STACK_CAP:
            free(stack)
            return -1
        if nk == 2:
            stack[2 * top] = child[2]
            stack[2 * top + 1] = child[3]
            top += 1
        if nk >= 1:
            stack[2 * top] = child[0]
            stack[2 * top + 1] = child[1]
            top += 1
    free(stack)
    return 0


def build_priority(t, int64_t grain, int nthreads):
    cdef Kd k = _kd_view(t, True)
    cdef int64_t n = t.pts.shape[0]
    cdef int64_t[::1] fv = np.zeros(1, dtype=np.int64)
    cdef int64_t[::1] fe = np.full(1, n, dtype=np.int64)
    cdef int64_t[:, ::1] nxt, scratch
    cdef int64_t[::1] status
    cdef Py_ssize_t j, nf
    cdef int nk
    while fv.shape[0] > 0:
        nf = fv.shape[0]
        nxt = np.full((2 * nf, 2), -1, dtype=np.int64)
        scratch = np.zeros((nf, 4), dtype=np.int64)
        status = np.zeros(nf, dtype=np.int64)
        for j in prange(nf, nogil=True, schedule="dynamic", chunksize=1,
                        num_threads=nthreads):
            if fe[j] - fv[j] <= grain:
                status[j] = pr_build_subtree(&k, fv[j], fe[j])
            else:
                nk = pr_split_node(&k, fv[j], fe[j], &scratch[j, 0])
                if nk >= 1:
                    nxt[2 * j, 0] = scratch[j, 0]
                    nxt[2 * j, 1] = scratch[j, 1]
                if nk == 2:
                    nxt[2 * j + 1, 0] = scratch[j, 2]
                    nxt[2 * j + 1, 1] = scratch[j, 3]
        if np.any(np.asarray(status) != 0):
            raise MemoryError("priority tree build stack exhausted")
        arr = np.asarray(nxt)
        arr = arr[arr[:, 0] >= 0]
        fv = arr[:, 0].copy()
        fe = arr[:, 1].copy()


cdef int64_t pr_nn_one(Kd *t, const double *q, int64_t qrank, double *out_sq,
                       int64_t *out_visits) noexcept nogil:
    cdef int d = t.d
    cdef int64_t stack_n[STACK_CAP]
    cdef double stack_d[STACK_CAP]
    cdef int top = 0
    cdef int64_t v, lc, rc, i, best_i = -1, visits = 0
    cdef double bd, dl = 0, dr = 0, d2, best_sq = INFINITY
    cdef bint have_l, have_r
    if t.rank[0] >= qrank:
        out_sq[0] = INFINITY
        out_visits[0] = 0
        return -1
    stack_n[0] = 0
    stack_d[0] = box_sq(t.lo, t.hi, q, d)
    top = 1
    while top > 0:
        top -= 1
        v = stack_n[top]
        bd = stack_d[top]
        if bd > best_sq:
            continue
        visits += 1
        d2 = sq_dist(t.pts + v * d, q, d)
        i = t.idx[v]
        if d2 < best_sq or (d2 == best_sq and i < best_i):
            best_sq = d2
            best_i = i
        lc = t.left[v]
        rc = t.right[v]
        have_l = lc >= 0 and t.rank[lc] < qrank
        have_r = rc >= 0 and t.rank[rc] < qrank
        if have_l:
            dl = box_sq(t.lo + lc * d, t.hi + lc * d, q, d)
        if have_r:
            dr = box_sq(t.lo + rc * d, t.hi + rc * d, q, d)
        if top + 2 > STACK_CAP:
            best_i = -2
            break
        if have_l and have_r:
            if dr < dl:
                stack_n[top] = lc; stack_d[top] = dl; top += 1
                stack_n[top] = rc; stack_d[top] = dr; top += 1
            else:
                stack_n[top] = rc; stack_d[top] = dr; top += 1
                stack_n[top] = lc; stack_d[top] = dl; top += 1
        elif have_l:
            stack_n[top] = lc; stack_d[top] = dl; top += 1
        elif have_r:
            stack_n[top] = rc; stack_d[top] = dr; top += 1
    out_sq[0] = best_sq
    out_visits[0] = visits
    return best_i


def priority_nn(t, const double[:, ::1] queries, const int64_t[::1] qrank, int nthreads):
    cdef Kd k = _kd_view(t, True)
    cdef Py_ssize_t nq = queries.shape[0], j
    out_i_arr = np.full(nq, -1, dtype=np.int64)
    out_sq_arr = np.full(nq, np.inf)
    visits_arr = np.zeros(nq, dtype=np.int64)
    cdef int64_t[::1] out_i = out_i_arr
    cdef double[::1] out_sq = out_sq_arr
    cdef int64_t[::1] visits = visits_arr
    if nq == 0:
        return out_i_arr, out_sq_arr, visits_arr
    for j in prange(nq, nogil=True, schedule="dynamic", chunksize=64,
                    num_threads=nthreads):
        out_i[j] = pr_nn_one(&k, &queries[j, 0], qrank[j], &out_sq[j],
                             &visits[j])
    _check_stack(out_i_arr)
    return out_i_arr, out_sq_arr, visits_arr


def priority_dependent(t, const double[:, ::1] coords, const int64_t[::1] rank,
                       const uint8_t[::1] noise, int nthreads):
    cdef Kd k = _kd_view(t, True)
    cdef Py_ssize_t n = coords.shape[0], i
    dep_arr = np.full(n, -1, dtype=np.int64)
    sq_arr = np.full(n, np.inf)
    visits_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] dep = dep_arr
    cdef double[::1] sq = sq_arr
    cdef int64_t[::1] visits = visits_arr
    for i in prange(n, nogil=True, schedule="dynamic", chunksize=64,
                    num_threads=nthreads):
        if not noise[i]:
            dep[i] = pr_nn_one(&k, &coords[i, 0], rank[i], &sq[i], &visits[i])
    _check_stack(dep_arr)
    return dep_arr, sq_arr


# ------------------------------------------------------ dependent finders

def incomplete_dependent(t, const double[:, ::1] coords, const int64_t[::1] order,
                         const uint8_t[::1] noise, const int64_t[::1] slot_of,
                         const int64_t[::1] leaf_of):
    cdef Kd k = _kd_view(t)
    cdef Py_ssize_t n = coords.shape[0], pos
    cdef Py_ssize_t m = t.lo.shape[0], nslots = t.pts.shape[0]
    cdef int64_t i, s, v, unused
    node_active_arr = np.zeros(m, dtype=np.uint8)
    slot_active_arr = np.zeros(nslots, dtype=np.uint8)
    cdef uint8_t[::1] node_active = node_active_arr
    cdef uint8_t[::1] slot_active = slot_active_arr
    dep_arr = np.full(n, -1, dtype=np.int64)
    sq_arr = np.full(n, np.inf)
    cdef int64_t[::1] dep = dep_arr
    cdef double[::1] sq = sq_arr
    with nogil:
        for pos in range(n):
            i = order[pos]
            if not noise[i]:
                dep[i] = kd_nn_one(&k, 0, &coords[i, 0], -1, &node_active[0],
                                   &slot_active[0], &sq[i], &unused)
            s = slot_of[i]
            slot_active[s] = 1
            v = leaf_of[s]
            while v >= 0 and not node_active[v]:
                node_active[v] = 1
                v = k.parent[v]
    _check_stack(dep_arr)
    return dep_arr, sq_arr


cdef int64_t fw_query_one(Kd *f, const int64_t *node_off, int64_t bound,
                          const double *q, double *out_sq) noexcept nogil:
    cdef int64_t j = bound, ci, best_i = -1, unused
    cdef double csq, best_sq = INFINITY
    while j > 0:
        ci = kd_nn_one(f, node_off[j - 1], q, -1, NULL, NULL, &csq, &unused)
        if ci == -2:
            best_i = -2
            break
        # write-min on (distance, id)
        if csq < best_sq or (csq == best_sq and ci < best_i):
            best_sq = csq
            best_i = ci
        j -= j & -j
    out_sq[0] = best_sq
    return best_i


def fenwick_query_one(f, int64_t bound, const double[::1] q):
    cdef Kd k = _kd_view(f)
    cdef int64_t[::1] node_off = f.node_off
    cdef double sq
    cdef int64_t i
    if bound <= 0:
        return -1, np.inf
    i = fw_query_one(&k, &node_off[0], bound, &q[0], &sq)
    return i, sq


def fenwick_dependent(f, const double[:, ::1] coords, const int64_t[::1] order,
                      const uint8_t[::1] noise, int nthreads):
    cdef Kd k = _kd_view(f)
    cdef int64_t[::1] node_off = f.node_off
    cdef Py_ssize_t n = coords.shape[0], pos
    cdef int64_t i
    dep_arr = np.full(n, -1, dtype=np.int64)
    sq_arr = np.full(n, np.inf)
    cdef int64_t[::1] dep = dep_arr
    cdef double[::1] sq = sq_arr
    for pos in prange(1, n, nogil=True, schedule="dynamic", chunksize=64,
                      num_threads=nthreads):
        i = order[pos]
        if not noise[i]:
            dep[i] = fw_query_one(&k, &node_off[0], pos, &coords[i, 0], &sq[i])
    _check_stack(dep_arr)
    return dep_arr, sq_arr


# -------------------------------------------------------------- brute force

def brute_density(const double[:, ::1] coords, double r, int nthreads):
    cdef Py_ssize_t n = coords.shape[0], i, j
    cdef int d = coords.shape[1]
    cdef double r2 = r * r
    cdef int64_t c
    out_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    for i in prange(n, nogil=True, schedule="static", num_threads=nthreads):
        c = 0
        for j in range(n):
            if sq_dist(&coords[j, 0], &coords[i, 0], d) <= r2:
                c = c + 1
        out[i] = c
    return out_arr


def brute_dependent(const double[:, ::1] coords, const int64_t[::1] rank,
                    const uint8_t[::1] noise, int nthreads):
    cdef Py_ssize_t n = coords.shape[0], i, j, k, t
    cdef int d = coords.shape[1]
    cdef int64_t best, cand
    cdef double best_sq, d2, dx, dy, qx, qy
    order_arr = np.empty(n, dtype=np.int64)
    order_arr[np.asarray(rank)] = np.arange(n, dtype=np.int64)
    # higher-priority candidates of rank k are the contiguous prefix [0, k)
    sorted_arr = np.ascontiguousarray(np.asarray(coords)[order_arr])
    cdef const int64_t[::1] order = order_arr
    cdef const double[:, ::1] S = sorted_arr
    dep_arr = np.full(n, -1, dtype=np.int64)
    sq_arr = np.full(n, np.inf)
    cdef int64_t[::1] dep = dep_arr
    cdef double[::1] sq = sq_arr
    for t in prange(n, nogil=True, schedule="dynamic", chunksize=16,
                    num_threads=nthreads):
        # largest prefixes first for balance
        k = n - 1 - t
        i = order[k]
        if noise[i]:
            continue
        best = -1
        best_sq = INFINITY
        if d == 2:
            qx = S[k, 0]
            qy = S[k, 1]
            for j in range(k):
                dx = S[j, 0] - qx
                dy = S[j, 1] - qy
                d2 = dx * dx
                d2 = d2 + dy * dy
                if d2 <= best_sq:
                    cand = order[j]
                    if d2 < best_sq or cand < best:
                        best_sq = d2
                        best = cand
        else:
            for j in range(k):
                d2 = sq_dist(&S[j, 0], &S[k, 0], d)
                if d2 <= best_sq:
                    cand = order[j]
                    if d2 < best_sq or cand < best:
                        best_sq = d2
                        best = cand
        dep[i] = best
        sq[i] = best_sq
    return dep_arr, sq_arr


# -------------------------------------------------------------- union-find

cdef inline int64_t uf_find_c(int64_t *parent, int64_t a) noexcept nogil:
    cdef int64_t p, gp
    while True:
        p = pdpc_load64(&parent[a])
        if p == a:
            return a
        gp = pdpc_load64(&parent[p])
        if gp != p:
            # path splitting; losing the race is harmless
            pdpc_cas64(&parent[a], p, gp)
        a = p


cdef inline void uf_unite_c(int64_t *parent, int64_t a, int64_t b) noexcept nogil:
    cdef int64_t ra, rb, tmp
    while True:
        ra = uf_find_c(parent, a)
        rb = uf_find_c(parent, b)
        if ra == rb:
            return
        if ra < rb:
            tmp = ra; ra = rb; rb = tmp
        # higher id links below lower id
        if pdpc_cas64(&parent[ra], ra, rb):
            return


def uf_unite(int64_t[::1] parent, int64_t[::1] a, int64_t[::1] b, int nthreads):
    cdef Py_ssize_t m = a.shape[0], j
    if m == 0:
        return
    for j in prange(m, nogil=True, schedule="dynamic", chunksize=256,
                    num_threads=nthreads):
        uf_unite_c(&parent[0], a[j], b[j])


def uf_find_all(int64_t[::1] parent, int nthreads):
    cdef Py_ssize_t n = parent.shape[0], j
    out_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    if n == 0:
        return out_arr
    for j in prange(n, nogil=True, schedule="static", num_threads=nthreads):
        out[j] = uf_find_c(&parent[0], j)
    return out_arr
