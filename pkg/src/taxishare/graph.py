"""Road networks as CSR adjacency arrays plus the Dijkstra family."""
import heapq
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import INF

VEH = "veh"
PSG = "psg"
FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class Csr:
    indptr: np.ndarray
    heads: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_edges(cls, n, tails, heads, weights):
        tails = np.asarray(tails, dtype=np.int64)
        heads = np.asarray(heads, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.int64)
        order = np.lexsort((weights, heads, tails))
        tails, heads, weights = tails[order], heads[order], weights[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, tails + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(indptr, np.ascontiguousarray(heads), np.ascontiguousarray(weights))

    def neighbors(self, v):
        a, b = self.indptr[v], self.indptr[v + 1]
        return zip(self.heads[a:b].tolist(), self.weights[a:b].tolist())

    def edge_triples(self):
        tails = np.repeat(np.arange(len(self.indptr) - 1), np.diff(self.indptr))
        return tails, self.heads, self.weights

    def equals(self, other):
        return (np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.heads, other.heads)
                and np.array_equal(self.weights, other.weights))


class RoadNetwork:
    """Shared-vertex dual graph: vehicle edges and passenger (walking) edges.

    A vertex is vehicle-eligible if it touches a vehicle edge and
    passenger-eligible if it touches a passenger edge.
    """

    def __init__(self, n, veh_edges, psg_edges):
        self.n = n
        vt, vh, vw = (np.asarray(a, dtype=np.int64).reshape(-1) for a in _split(veh_edges))
        pt, ph, pw = (np.asarray(a, dtype=np.int64).reshape(-1) for a in _split(psg_edges))
        for w in (vw, pw):
            if len(w) and w.min() <= 0:
                raise ValueError("non-positive travel time")
        self.veh_out = Csr.from_edges(n, vt, vh, vw)
        self.veh_in = Csr.from_edges(n, vh, vt, vw)
        self.psg_out = Csr.from_edges(n, pt, ph, pw)
        self.psg_in = Csr.from_edges(n, ph, pt, pw)
        self.veh_eligible = np.zeros(n, dtype=bool)
        self.psg_eligible = np.zeros(n, dtype=bool)
        self.veh_eligible[vt] = True
        self.veh_eligible[vh] = True
        self.psg_eligible[pt] = True
        self.psg_eligible[ph] = True

    def graph(self, mode, direction=FORWARD):
        if mode == VEH:
            return self.veh_out if direction == FORWARD else self.veh_in
        if mode == PSG:
            return self.psg_out if direction == FORWARD else self.psg_in
        raise ValueError(f"unknown mode {mode!r}")

    def edges(self, mode):
        t, h, w = self.graph(mode).edge_triples()
        return list(zip(t.tolist(), h.tolist(), w.tolist()))

    def equals(self, other):
        return (self.n == other.n
                and self.veh_out.equals(other.veh_out)
                and self.psg_out.equals(other.psg_out)
                and np.array_equal(self.veh_eligible, other.veh_eligible)
                and np.array_equal(self.psg_eligible, other.psg_eligible))


def _split(edges):
    edges = list(edges)
    if not edges:
        return [], [], []
    t, h, w = zip(*edges)
    return t, h, w


class DistanceLabels:
    """``dist[lane, v]`` tentative distances of a (possibly batched) search."""

    def __init__(self, dist, settled=None):
        self.dist = dist
        self.settled = settled

    @property
    def k(self):
        return self.dist.shape[0]

    def __getitem__(self, v):
        return self.dist[:, v]


def dijkstra(net, mode, roots, direction=FORWARD, stop_predicate=None, bound=INF, batched=True):
    """Dijkstra from ``roots`` given as ``(vertex, offset)`` pairs.

    With ``batched`` each root owns a lane and the result has one row per
    root; otherwise all roots seed a single lane.  ``stop_predicate(v, key)``
    is checked whenever a vertex is settled and ends the search when true.
    """
    g = net.graph(mode, direction)
    verts = np.array([r for r, _ in roots], dtype=np.int64)
    offs = np.array([o for _, o in roots], dtype=np.int64)
    if len(verts) == 0:
        raise ValueError("at least one root required")
    if (offs < 0).any():
        raise ValueError("offsets must be non-negative")
    if stop_predicate is not None:
        return _dijkstra_with_stop(g, verts, offs, stop_predicate, bound, batched)
    if batched:
        return DistanceLabels(kernels.sssp_batched(g.indptr, g.heads, g.weights, verts, offs, bound))
    return DistanceLabels(kernels.sssp(g.indptr, g.heads, g.weights, verts, offs, bound)[None, :])


def _dijkstra_with_stop(g, verts, offs, stop_predicate, bound, batched):
    n = len(g.indptr) - 1
    k = len(verts) if batched else 1
    dist = np.full((k, n), INF, dtype=np.int64)
    pending = {}
    heap = []
    for lane, (r, o) in enumerate(zip(verts.tolist(), offs.tolist())):
        lane = lane if batched else 0
        if o < dist[lane, r] and o <= bound:
            dist[lane, r] = o
            pending.setdefault(r, set()).add(lane)
            heapq.heappush(heap, (o, r))
    settled = []
    while heap:
        key, u = heapq.heappop(heap)
        lanes = pending.get(u)
        if not lanes or key > min(dist[l, u] for l in lanes):
            continue
        del pending[u]
        settled.append(u)
        if stop_predicate(u, key):
            break
        for v, w in g.neighbors(u):
            best = INF
            for l in lanes:
                nd = dist[l, u] + w
                if nd < dist[l, v] and nd <= bound:
                    dist[l, v] = nd
                    pending.setdefault(v, set()).add(l)
                    best = min(best, nd)
            if best < INF:
                heapq.heappush(heap, (best, v))
    return DistanceLabels(dist, settled)


def distances_from(net, mode, source, direction=FORWARD, bound=INF):
    g = net.graph(mode, direction)
    return kernels.sssp(g.indptr, g.heads, g.weights,
                        np.array([source], dtype=np.int64), np.zeros(1, dtype=np.int64), bound)


def all_pairs(net, mode):
    g = net.graph(mode)
    return kernels.all_pairs(g.indptr, g.heads, g.weights)


def shortest_path(net, source, target, mode=VEH):
    """Vertex sequence of a deterministic shortest path, or None."""
    g = net.graph(mode)
    dist, parent = kernels.sssp_parents(g.indptr, g.heads, g.weights, source)
    if dist[target] >= INF:
        return None
    path = [target]
    while path[-1] != source:
        path.append(int(parent[path[-1]]))
    path.reverse()
    return path, dist


def find_meeting_points(net, v, rho, side):
    """Vertices eligible in both graphs within walking time ``rho`` of ``v``.

    Pickups are reachable from ``v`` on foot; dropoffs reach ``v`` on foot.
    Returned as ``(vertex, walk)`` pairs ordered by vertex id.
    """
    if not net.psg_eligible[v]:
        raise ValueError(f"vertex {v} is not passenger-eligible")
    direction = FORWARD if side == "pickup" else REVERSE
    if side not in ("pickup", "dropoff"):
        raise ValueError(f"unknown side {side!r}")
    dist = distances_from(net, PSG, v, direction, bound=rho)
    mask = (dist <= rho) & net.veh_eligible & net.psg_eligible
    idx = np.nonzero(mask)[0]
    return [(int(u), int(dist[u])) for u in idx]
