"""Pure-Python twins of the compiled kernels in ``_ckernels.pyx``."""

from __future__ import annotations

import heapq

import numpy as np


def sssp(indptr, nbr, wts, eids, mask, source):
    n = len(indptr) - 1
    dist = [float("inf")] * n
    parent = [-1] * n
    pedge = [-1] * n
    settled = [False] * n
    order = []
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    wts = wts.tolist()
    eids = eids.tolist()
    mask = mask.tolist()

    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if settled[u] or du > dist[u]:
            continue
        settled[u] = True
        order.append(u)
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
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and u < parent[v]:
                parent[v] = u
                pedge[v] = e
    return (
        np.array(dist, dtype=np.float64),
        np.array(parent, dtype=np.int64),
        np.array(pedge, dtype=np.int64),
        np.array(order, dtype=np.int64),
    )


def constrained_sssp(indptr, nbr, wts, eids, in_h, source, budget):
    n = len(indptr) - 1
    width = budget + 1
    states = n * width
    dist = [float("inf")] * states
    pstate = [-1] * states
    pedge = [-1] * states
    settled = [False] * states
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    wts = wts.tolist()
    eids = eids.tolist()
    in_h = in_h.tolist()

    start = source * width
    dist[start] = 0.0
    heap = [(0.0, start)]
    while heap:
        dx, x = heapq.heappop(heap)
        if settled[x] or dx > dist[x]:
            continue
        settled[x] = True
        u, k = divmod(x, width)
        for j in range(indptr[u], indptr[u + 1]):
            e = eids[j]
            kk = k if in_h[e] else k + 1
            if kk > budget:
                continue
            y = nbr[j] * width + kk
            if settled[y]:
                continue
            nd = dx + wts[j]
            if nd < dist[y]:
                dist[y] = nd
                pstate[y] = x
                pedge[y] = e
                heapq.heappush(heap, (nd, y))
            elif nd == dist[y] and x < pstate[y]:
                pstate[y] = x
                pedge[y] = e
    return (
        np.array(dist, dtype=np.float64).reshape(n, width),
        np.array(pstate, dtype=np.int64),
        np.array(pedge, dtype=np.int64),
    )


def tree_missing_counts(order, parent, pedge, in_h):
    n = len(parent)
    miss = np.full(n, -1, dtype=np.int64)
    if len(order) == 0:
        return miss
    order = order.tolist()
    parent = parent.tolist()
    pedge = pedge.tolist()
    counts = [-1] * n
    counts[order[0]] = 0
    for v in order[1:]:
        counts[v] = counts[parent[v]] + (0 if in_h[pedge[v]] else 1)
    miss[:] = counts
    return miss


def mark_tree_paths(parent, pedge, targets, out_mask):
    """Set out_mask on every edge of the tree paths from the root to targets."""
    seen = set()
    for v in targets.tolist():
        while parent[v] >= 0 and v not in seen:
            seen.add(v)
            out_mask[pedge[v]] = 1
            v = parent[v]


def mark_prefix_suffix(parent, pedge, targets, in_h, miss, ell, out_mask):
    """Set out_mask on the first and last ``ell`` missing edges of each root path."""
    for v in targets.tolist():
        seen_missing = 0
        while parent[v] >= 0:
            e = pedge[v]
            if not in_h[e]:
                if seen_missing < ell or miss[v] <= ell:
                    out_mask[e] = 1
                seen_missing += 1
            v = parent[v]
