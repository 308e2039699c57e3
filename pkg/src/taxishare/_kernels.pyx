# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shortest-path kernels over CSR adjacency arrays."""
import numpy as np
cimport numpy as cnp
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from libcpp.vector cimport vector

ctypedef cnp.int64_t i64
ctypedef pair[i64, i64] item

cdef i64 _INF = (<i64>1) << 60
INF = 1 << 60


cdef void _run(const i64[::1] ptr, const i64[::1] hd, const i64[::1] wt,
               i64[::1] dist, i64[::1] parent, priority_queue[item]& heap,
               i64 bound, bint track) noexcept nogil:
    cdef i64 d, u, v, nd, e
    cdef item top
    while not heap.empty():
        top = heap.top()
        heap.pop()
        d = -top.first
        u = -top.second
        if d != dist[u]:
            continue
        for e in range(ptr[u], ptr[u + 1]):
            nd = d + wt[e]
            v = hd[e]
            if nd < dist[v] and nd <= bound:
                dist[v] = nd
                if track:
                    parent[v] = u
                heap.push(item(-nd, -v))


def sssp(cnp.int64_t[::1] indptr, cnp.int64_t[::1] heads, cnp.int64_t[::1] weights,
         cnp.int64_t[::1] roots, cnp.int64_t[::1] offsets, i64 bound=_INF):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i
    out = np.full(n, _INF, dtype=np.int64)
    cdef i64[::1] dist = out
    cdef i64[::1] dummy = np.empty(1, dtype=np.int64)
    cdef priority_queue[item] heap
    for i in range(roots.shape[0]):
        if offsets[i] < dist[roots[i]] and offsets[i] <= bound:
            dist[roots[i]] = offsets[i]
            heap.push(item(-offsets[i], -roots[i]))
    with nogil:
        _run(indptr, heads, weights, dist, dummy, heap, bound, False)
    return out


def sssp_parents(cnp.int64_t[::1] indptr, cnp.int64_t[::1] heads, cnp.int64_t[::1] weights,
                 i64 root):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, _INF, dtype=np.int64)
    par = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] dist = out
    cdef i64[::1] parent = par
    cdef priority_queue[item] heap
    dist[root] = 0
    heap.push(item(0, -root))
    with nogil:
        _run(indptr, heads, weights, dist, parent, heap, _INF, True)
    return out, par


def sssp_batched(cnp.int64_t[::1] indptr, cnp.int64_t[::1] heads, cnp.int64_t[::1] weights,
                 cnp.int64_t[::1] roots, cnp.int64_t[::1] offsets, i64 bound=_INF):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t k = roots.shape[0]
    out = np.full((n, k), _INF, dtype=np.int64)
    pend = np.zeros((n, k), dtype=np.uint8)
    cdef i64[:, ::1] dist = out
    cdef unsigned char[:, ::1] pending = pend
    cdef priority_queue[item] heap
    cdef vector[i64] lanes
    cdef Py_ssize_t l, li
    cdef i64 key, u, v, w, nd, best, lo, e
    cdef item top
    for l in range(k):
        if offsets[l] <= bound:
            dist[roots[l], l] = offsets[l]
            pending[roots[l], l] = 1
            heap.push(item(-offsets[l], -roots[l]))
    with nogil:
        while not heap.empty():
            top = heap.top()
            heap.pop()
            key = -top.first
            u = -top.second
            lanes.clear()
            lo = _INF
            for l in range(k):
                if pending[u, l]:
                    lanes.push_back(l)
                    if dist[u, l] < lo:
                        lo = dist[u, l]
            if lanes.size() == 0 or key > lo:
                continue
            for li in range(<Py_ssize_t>lanes.size()):
                pending[u, lanes[li]] = 0
            for e in range(indptr[u], indptr[u + 1]):
                v = heads[e]
                w = weights[e]
                best = _INF
                for li in range(<Py_ssize_t>lanes.size()):
                    l = lanes[li]
                    nd = dist[u, l] + w
                    if nd < dist[v, l] and nd <= bound:
                        dist[v, l] = nd
                        pending[v, l] = 1
                        if nd < best:
                            best = nd
                if best < _INF:
                    heap.push(item(-best, -v))
    return out.T.copy()


def all_pairs(cnp.int64_t[::1] indptr, cnp.int64_t[::1] heads, cnp.int64_t[::1] weights):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t s
    out = np.full((n, n), _INF, dtype=np.int64)
    cdef i64[:, ::1] mat = out
    cdef i64[::1] dummy = np.empty(1, dtype=np.int64)
    cdef priority_queue[item] heap
    with nogil:
        for s in range(n):
            mat[s, s] = 0
            heap.push(item(0, -s))
            _run(indptr, heads, weights, mat[s], dummy, heap, _INF, False)
    return out
