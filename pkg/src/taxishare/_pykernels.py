"""Pure-Python shortest-path kernels over CSR adjacency arrays.

Drop-in fallback for the compiled ``_kernels`` extension; both expose the
same four functions with identical results.
"""
import heapq

import numpy as np

INF = 1 << 60


def sssp(indptr, heads, weights, roots, offsets, bound=INF):
    """Multi-root Dijkstra; returns one label per vertex (min over roots)."""
    n = len(indptr) - 1
    ptr = indptr.tolist()
    hd = heads.tolist()
    wt = weights.tolist()
    dist = [INF] * n
    heap = []
    for r, off in zip(roots.tolist(), offsets.tolist()):
        if off < dist[r] and off <= bound:
            dist[r] = off
            heap.append((off, r))
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if d != dist[u]:
            continue
        for e in range(ptr[u], ptr[u + 1]):
            nd = d + wt[e]
            v = hd[e]
            if nd < dist[v] and nd <= bound:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return np.array(dist, dtype=np.int64)


def sssp_batched(indptr, heads, weights, roots, offsets, bound=INF):
    """Batched Dijkstra with one label per root.

    The queue is keyed by the smallest pending label of a vertex; popping a
    vertex relaxes every lane that improved since its last relaxation.
    """
    n = len(indptr) - 1
    k = len(roots)
    ptr = indptr.tolist()
    hd = heads.tolist()
    wt = weights.tolist()
    dist = [[INF] * k for _ in range(n)]
    pending = [[False] * k for _ in range(n)]
    heap = []
    for lane, (r, off) in enumerate(zip(roots.tolist(), offsets.tolist())):
        if off <= bound:
            dist[r][lane] = off
            pending[r][lane] = True
            heap.append((off, r))
    heapq.heapify(heap)
    while heap:
        key, u = heapq.heappop(heap)
        du = dist[u]
        pu = pending[u]
        lanes = [l for l in range(k) if pu[l]]
        if not lanes or key > min(du[l] for l in lanes):
            continue
        for l in lanes:
            pu[l] = False
        for e in range(ptr[u], ptr[u + 1]):
            v = hd[e]
            w = wt[e]
            dv = dist[v]
            best = INF
            for l in lanes:
                nd = du[l] + w
                if nd < dv[l] and nd <= bound:
                    dv[l] = nd
                    pending[v][l] = True
                    if nd < best:
                        best = nd
            if best < INF:
                heapq.heappush(heap, (best, v))
    return np.array(dist, dtype=np.int64).T.copy() if n else np.zeros((k, 0), dtype=np.int64)


def sssp_parents(indptr, heads, weights, root):
    """Single-source Dijkstra with parent pointers (-1 for roots/unreached)."""
    n = len(indptr) - 1
    ptr = indptr.tolist()
    hd = heads.tolist()
    wt = weights.tolist()
    dist = [INF] * n
    parent = [-1] * n
    dist[root] = 0
    heap = [(0, root)]
    while heap:
        d, u = heapq.heappop(heap)
        if d != dist[u]:
            continue
        for e in range(ptr[u], ptr[u + 1]):
            nd = d + wt[e]
            v = hd[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return np.array(dist, dtype=np.int64), np.array(parent, dtype=np.int64)


def all_pairs(indptr, heads, weights):
    n = len(indptr) - 1
    out = np.empty((n, n), dtype=np.int64)
    offs = np.zeros(1, dtype=np.int64)
    for s in range(n):
        out[s] = sssp(indptr, heads, weights, np.array([s], dtype=np.int64), offs)
    return out
