# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled shortest-path kernels.

Every function here has a line-for-line twin in ``_pykernels``; the two must
return identical arrays for identical inputs.
"""

import numpy as np
cimport numpy as cnp
from libcpp.queue cimport priority_queue
from libcpp.utility cimport pair

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef pair[double, i64] entry


def sssp(const i64[::1] indptr, const i64[::1] nbr, const double[::1] wts,
         const i64[::1] eids, const cnp.uint8_t[::1] mask, i64 source):
    cdef i64 n = indptr.shape[0] - 1
    dist_arr = np.full(n, np.inf)
    parent_arr = np.full(n, -1, dtype=np.int64)
    pedge_arr = np.full(n, -1, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    settled_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] dist = dist_arr
    cdef i64[::1] parent = parent_arr
    cdef i64[::1] pedge = pedge_arr
    cdef i64[::1] order = order_arr
    cdef cnp.uint8_t[::1] settled = settled_arr
    cdef priority_queue[entry] heap
    cdef entry top
    cdef i64 u, v, j, e, count = 0
    cdef double du, nd

    with nogil:
        dist[source] = 0.0
        heap.push(entry(-0.0, -source))
        while not heap.empty():
            top = heap.top()
            heap.pop()
            u = -top.second
            if settled[u]:
                continue
            du = -top.first
            if du > dist[u]:
                continue
            settled[u] = 1
            order[count] = u
            count += 1
            for j in range(indptr[u], indptr[u + 1]):
                e = eids[j]
                if not mask[e]:
                    continue
                v = nbr[j]
                if settled[v]:
                    continue
                nd = du + wts[j]
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    pedge[v] = e
                    heap.push(entry(-nd, -v))
                elif nd == dist[v] and u < parent[v]:
                    parent[v] = u
                    pedge[v] = e
    return dist_arr, parent_arr, pedge_arr, order_arr[:count].copy()


def constrained_sssp(const i64[::1] indptr, const i64[::1] nbr, const double[::1] wts,
                     const i64[::1] eids, const cnp.uint8_t[::1] in_h, i64 source,
                     i64 budget):
    cdef i64 n = indptr.shape[0] - 1
    cdef i64 width = budget + 1
    cdef i64 states = n * width
    dist_arr = np.full(states, np.inf)
    pstate_arr = np.full(states, -1, dtype=np.int64)
    pedge_arr = np.full(states, -1, dtype=np.int64)
    settled_arr = np.zeros(states, dtype=np.uint8)
    cdef double[::1] dist = dist_arr
    cdef i64[::1] pstate = pstate_arr
    cdef i64[::1] pedge = pedge_arr
    cdef cnp.uint8_t[::1] settled = settled_arr
    cdef priority_queue[entry] heap
    cdef entry top
    cdef i64 x, u, k, v, kk, y, j, e, start
    cdef double dx, nd

    with nogil:
        start = source * width
        dist[start] = 0.0
        heap.push(entry(-0.0, -start))
        while not heap.empty():
            top = heap.top()
            heap.pop()
            x = -top.second
            if settled[x]:
                continue
            dx = -top.first
            if dx > dist[x]:
                continue
            settled[x] = 1
            u = x // width
            k = x - u * width
            for j in range(indptr[u], indptr[u + 1]):
                e = eids[j]
                kk = k if in_h[e] else k + 1
                if kk > budget:
                    continue
                v = nbr[j]
                y = v * width + kk
                if settled[y]:
                    continue
                nd = dx + wts[j]
                if nd < dist[y]:
                    dist[y] = nd
                    pstate[y] = x
                    pedge[y] = e
                    heap.push(entry(-nd, -y))
                elif nd == dist[y] and x < pstate[y]:
                    pstate[y] = x
                    pedge[y] = e
    return dist_arr.reshape(n, width), pstate_arr, pedge_arr


def tree_missing_counts(const i64[::1] order, const i64[::1] parent,
                        const i64[::1] pedge, const cnp.uint8_t[::1] in_h):
    cdef i64 n = parent.shape[0]
    miss_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] miss = miss_arr
    cdef i64 i, v, p
    if order.shape[0] == 0:
        return miss_arr
    miss[order[0]] = 0
    for i in range(1, order.shape[0]):
        v = order[i]
        p = parent[v]
        miss[v] = miss[p] + (0 if in_h[pedge[v]] else 1)
    return miss_arr


def mark_tree_paths(const i64[::1] parent, const i64[::1] pedge,
                    const i64[::1] targets, cnp.uint8_t[::1] out_mask):
    """Set out_mask on every edge of the tree paths from the root to targets."""
    cdef i64 n = parent.shape[0]
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] seen = seen_arr
    cdef i64 i, v
    for i in range(targets.shape[0]):
        v = targets[i]
        while parent[v] >= 0 and not seen[v]:
            seen[v] = 1
            out_mask[pedge[v]] = 1
            v = parent[v]


def mark_prefix_suffix(const i64[::1] parent, const i64[::1] pedge,
                       const i64[::1] targets, const cnp.uint8_t[::1] in_h,
                       const i64[::1] miss, i64 ell, cnp.uint8_t[::1] out_mask):
    """Set out_mask on the first and last ``ell`` missing edges of each root path."""
    cdef i64 i, v, e, seen_missing
    for i in range(targets.shape[0]):
        v = targets[i]
        seen_missing = 0
        while parent[v] >= 0:
            e = pedge[v]
            if not in_h[e]:
                if seen_missing < ell or miss[v] <= ell:
                    out_mask[e] = 1
                seen_missing += 1
            v = parent[v]
