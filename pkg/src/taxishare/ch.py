"""Contraction hierarchy over the vehicle network.

Vertices are contracted lowest-priority first; the priority is the edge
difference plus the number of already contracted neighbours.  Witness
searches are hop- and settle-limited and fall back to adding the shortcut.
"""
import heapq
import struct

import numpy as np

from .graph import VEH
from .kernels import INF

_MAGIC = b"TSCH"
_VERSION = 1


class ContractionHierarchy:
    """Ranked vertices plus upward and (reversed) downward search graphs.

    ``up[v]`` lists edges ``v -> w`` with ``rank[w] > rank[v]``.
    ``down[v]`` lists edges ``u -> v`` with ``rank[u] > rank[v]`` as
    ``(u, length)`` so a reverse search from ``v`` walks them upwards.
    """

    def __init__(self, rank, up, down):
        self.n = len(rank)
        self.rank = np.asarray(rank, dtype=np.int64)
        self.up = up
        self.down = down
        self._fwd = {}
        self._rev = {}

    @property
    def num_edges(self):
        return sum(map(len, self.up)) + sum(map(len, self.down))

    def forward_space(self, v):
        """Settled ``(vertex, d_up)`` pairs of an upward search from ``v``."""
        space = self._fwd.get(v)
        if space is None:
            space = self._fwd[v] = _upward_search(self.up, v)
        return space

    def reverse_space(self, v):
        space = self._rev.get(v)
        if space is None:
            space = self._rev[v] = _upward_search(self.down, v)
        return space

    def distance(self, s, t):
        """Exact distance by intersecting the cached search spaces."""
        if s == t:
            return 0
        fwd = dict(self.forward_space(s))
        best = INF
        for v, d in self.reverse_space(t):
            du = fwd.get(v)
            if du is not None and du + d < best:
                best = du + d
        return best

    def up_csr(self):
        return _to_csr(self.up)

    def down_csr(self):
        return _to_csr(self.down)

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(_MAGIC + struct.pack("<II", _VERSION, self.n))
            fh.write(self.rank.astype("<i8").tobytes())
            for adj in (self.up, self.down):
                indptr, heads, weights = _to_csr(adj)
                fh.write(struct.pack("<Q", len(heads)))
                for arr in (indptr, heads, weights):
                    fh.write(arr.astype("<i8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            data = fh.read()
        if data[:4] != _MAGIC:
            raise ValueError(f"{path}: not a contraction hierarchy cache")
        version, n = struct.unpack_from("<II", data, 4)
        if version != _VERSION:
            raise ValueError(f"{path}: cache version {version}, expected {_VERSION}")
        pos = 12
        rank = np.frombuffer(data, "<i8", n, pos).astype(np.int64)
        pos += 8 * n
        adjs = []
        for _ in range(2):
            (m,) = struct.unpack_from("<Q", data, pos)
            pos += 8
            indptr = np.frombuffer(data, "<i8", n + 1, pos)
            pos += 8 * (n + 1)
            heads = np.frombuffer(data, "<i8", m, pos)
            pos += 8 * m
            weights = np.frombuffer(data, "<i8", m, pos)
            pos += 8 * m
            adjs.append(_from_csr(indptr, heads, weights))
        return cls(rank, adjs[0], adjs[1])


def _to_csr(adj):
    indptr = np.zeros(len(adj) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    heads = np.array([h for a in adj for h, _ in a], dtype=np.int64)
    weights = np.array([w for a in adj for _, w in a], dtype=np.int64)
    return indptr, heads, weights


def _from_csr(indptr, heads, weights):
    ip, hd, wt = indptr.tolist(), heads.tolist(), weights.tolist()
    return [list(zip(hd[ip[v]:ip[v + 1]], wt[ip[v]:ip[v + 1]])) for v in range(len(ip) - 1)]


def _upward_search(adj, source):
    dist = {source: 0}
    heap = [(0, source)]
    settled = []
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        settled.append((u, d))
        for w, length in adj[u]:
            nd = d + length
            if nd < dist.get(w, INF):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return settled


def ch_query(ch, s, t):
    """Bidirectional CH query; each side stops once its radius passes the best."""
    if s == t:
        return 0
    dist = ({s: 0}, {t: 0})
    heaps = ([(0, s)], [(0, t)])
    graphs = (ch.up, ch.down)
    best = INF
    side = 0
    while heaps[0] or heaps[1]:
        if not heaps[side]:
            side ^= 1
        heap = heaps[side]
        d, u = heapq.heappop(heap)
        if d > best:
            heap.clear()
            side ^= 1
            continue
        mine, other = dist[side], dist[side ^ 1]
        if d > mine[u]:
            continue
        if u in other and d + other[u] < best:
            best = d + other[u]
        for w, length in graphs[side][u]:
            nd = d + length
            if nd < mine.get(w, INF):
                mine[w] = nd
                heapq.heappush(heap, (nd, w))
        side ^= 1
    return best


def build_ch(net, order=None, hop_limit=16, settle_limit=1000):
    """Contract the vehicle graph of ``net``.

    ``order`` forces a contraction order (first = lowest rank); otherwise the
    lazy-update heuristic picks it.
    """
    n = net.n
    out_adj = [dict() for _ in range(n)]
    in_adj = [dict() for _ in range(n)]
    for u, v, w in net.edges(VEH):
        if u == v:
            continue
        if w < out_adj[u].get(v, INF):
            out_adj[u][v] = w
            in_adj[v][u] = w
    contracted_neighbors = [0] * n
    done = [False] * n
    rank = [0] * n
    up = [[] for _ in range(n)]
    down = [[] for _ in range(n)]

    def shortcuts_for(v):
        found = []
        outs = out_adj[v]
        if not outs:
            return found
        max_out = max(outs.values())
        for u, w_uv in in_adj[v].items():
            targets = {w: w_uv + w_vw for w, w_vw in outs.items() if w != u}
            if not targets:
                continue
            witness = _witness_search(out_adj, u, v, targets, w_uv + max_out,
                                      hop_limit, settle_limit)
            for w, via in targets.items():
                if witness.get(w, INF) > via:
                    found.append((u, w, via))
        return found

    def priority(v):
        return len(shortcuts_for(v)) - len(in_adj[v]) - len(out_adj[v]) + contracted_neighbors[v]

    def contract(v, r):
        rank[v] = r
        done[v] = True
        for u, w, via in shortcuts_for(v):
            if via < out_adj[u].get(w, INF):
                out_adj[u][w] = via
                in_adj[w][u] = via
        for w, length in sorted(out_adj[v].items()):
            up[v].append((w, length))
            del in_adj[w][v]
            contracted_neighbors[w] += 1
        for u, length in sorted(in_adj[v].items()):
            down[v].append((u, length))
            del out_adj[u][v]
            contracted_neighbors[u] += 1
        out_adj[v].clear()
        in_adj[v].clear()

    if order is not None:
        if sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of the vertices")
        for r, v in enumerate(order):
            contract(v, r)
    else:
        heap = [(priority(v), v) for v in range(n)]
        heapq.heapify(heap)
        r = 0
        while heap:
            _, v = heapq.heappop(heap)
            if done[v]:
                continue
            fresh = (priority(v), v)
            if heap and fresh > heap[0]:
                heapq.heappush(heap, fresh)
                continue
            contract(v, r)
            r += 1
    return ContractionHierarchy(rank, up, down)


def _witness_search(out_adj, source, skip, targets, limit, hop_limit, settle_limit):
    dist = {source: 0}
    hops = {source: 0}
    heap = [(0, source)]
    remaining = set(targets)
    settled = 0
    while heap and remaining and settled < settle_limit:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if d > limit:
            break
        settled += 1
        remaining.discard(u)
        if hops[u] >= hop_limit:
            continue
        for w, length in out_adj[u].items():
            if w == skip:
                continue
            nd = d + length
            if nd < dist.get(w, INF):
                dist[w] = nd
                hops[w] = hops[u] + 1
                heapq.heappush(heap, (nd, w))
    return dist


class SearchCounters:
    __slots__ = ("relaxed", "scanned", "settled")

    def __init__(self):
        self.relaxed = self.scanned = self.settled = 0

    def add(self, other):
        self.relaxed += other.relaxed
        self.scanned += other.scanned
        self.settled += other.settled


def batched_upward_search(adj, roots, visit, prune_lane=None, limit=INF, counters=None):
    """Bundled Dijkstra over an upward graph with one distance lane per root.

    The queue key of a vertex is its smallest lane that improved since the
    vertex was last settled; settling passes exactly those lanes to
    ``visit(u, labels, lanes)`` and relaxes them.  ``prune_lane(lane, dist)``
    stops a lane from being relaxed further; ``limit`` ends the whole search.
    """
    k = len(roots)
    dist = {}
    pending = {}
    heap = []
    for lane, (r, off) in enumerate(roots):
        lab = dist.get(r)
        if lab is None:
            lab = dist[r] = [INF] * k
        if off < lab[lane]:
            lab[lane] = off
            pending.setdefault(r, set()).add(lane)
            heap.append((off, r))
    heapq.heapify(heap)
    relaxed = settled = 0
    while heap:
        key, u = heapq.heappop(heap)
        lanes = pending.get(u)
        if not lanes:
            continue
        du = dist[u]
        low = min(du[l] for l in lanes)
        if key != low:
            # stale entry; a key below ``low`` belongs to lanes settled earlier
            if key < low:
                heapq.heappush(heap, (low, u))
            continue
        if low > limit:
            break
        del pending[u]
        settled += 1
        lanes = sorted(lanes)
        visit(u, du, lanes)
        if prune_lane is not None:
            lanes = [l for l in lanes if not prune_lane(l, du[l])]
        lanes = [l for l in lanes if du[l] <= limit]
        if not lanes:
            continue
        for w, length in adj[u]:
            relaxed += 1
            dw = dist.get(w)
            if dw is None:
                dw = dist[w] = [INF] * k
            best = INF
            for l in lanes:
                nd = du[l] + length
                if nd < dw[l]:
                    dw[l] = nd
                    pw = pending.get(w)
                    if pw is None:
                        pending[w] = {l}
                    else:
                        pw.add(l)
                    if nd < best:
                        best = nd
            if best < INF:
                heapq.heappush(heap, (best, w))
    if counters is not None:
        counters.relaxed += relaxed
        counters.settled += settled
    return dist
