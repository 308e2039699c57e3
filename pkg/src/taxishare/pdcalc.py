"""Pickup-to-dropoff vehicle distances for one request."""
from dataclasses import dataclass

import numpy as np

from .buckets import TransientBucketStore
from .ch import batched_upward_search
from .graph import FORWARD, REVERSE, VEH, dijkstra
from .kernels import INF


@dataclass
class PdDistanceTable:
    dist: np.ndarray  # pickups x dropoffs
    delta_max: int

    @property
    def delta_pd_min(self):
        finite = self.dist[self.dist < INF]
        return int(finite.min()) if finite.size else INF

    def row_min(self):
        """Smallest PD distance per pickup (INF for pickups reaching no dropoff)."""
        if self.dist.shape[1] == 0:
            return [INF] * self.dist.shape[0]
        return self.dist.min(axis=1).tolist()


def _farthest(net, root, targets, direction):
    """Largest distance between ``root`` and any target, settling only as far as needed."""
    remaining = set(targets)

    def done(v, _key):
        remaining.discard(v)
        return not remaining

    labels = dijkstra(net, VEH, [(root, 0)], direction, stop_predicate=done)
    return max(int(labels.dist[0, t]) for t in targets)


def pd_max_bound(net, ch, origin, destination, pickups, dropoffs):
    """Upper bound on every pickup-to-dropoff distance, routed via origin and destination."""
    if not pickups or not dropoffs:
        return INF
    if not (net.veh_eligible[origin] and net.veh_eligible[destination]):
        return INF
    to_origin = _farthest(net, origin, [p for p, _ in pickups], REVERSE)
    from_dest = _farthest(net, destination, [d for d, _ in dropoffs], FORWARD)
    direct = ch.distance(origin, destination)
    if INF in (to_origin, from_dest, direct):
        return INF
    return to_origin + direct + from_dest


class PdCalculator:
    """Owns the transient dropoff buckets reused across requests."""

    def __init__(self, ch, sorted_buckets=True):
        self.ch = ch
        self.store = TransientBucketStore(ch.n, sorted_buckets)

    def distances(self, pickups, dropoffs, delta_max, k=16, counters=None):
        dist = np.full((len(pickups), len(dropoffs)), INF, dtype=np.int64)
        if not pickups or not dropoffs:
            return PdDistanceTable(dist, delta_max)
        if delta_max >= INF:
            # no finite bound: answer every pair with a plain CH query
            for a, (p, _) in enumerate(pickups):
                for b, (d, _) in enumerate(dropoffs):
                    dist[a, b] = self.ch.distance(p, d)
            return PdDistanceTable(dist, delta_max)
        store = self.store
        store.clear()
        for b, (d, _) in enumerate(dropoffs):
            for v, dd in self.ch.reverse_space(d):
                if dd <= delta_max:
                    store.insert_entry(v, b, dd)
        for start in range(0, len(pickups), k):
            batch = pickups[start:start + k]
            self._batch(batch, start, delta_max, dist, counters)
        store.clear()
        return PdDistanceTable(dist, delta_max)

    def _batch(self, batch, offset, delta_max, dist, counters):
        store = self.store

        def visit(u, labels, lanes):
            low = min(labels[l] for l in lanes)

            def stop(entry):
                return entry[2] + low > delta_max

            def record(entry):
                dd, b = entry[2], entry[1]
                for l in lanes:
                    tent = labels[l] + dd
                    if tent <= delta_max and tent < dist[offset + l, b]:
                        dist[offset + l, b] = tent

            scanned = store.scan(u, record, stop)
            if counters is not None:
                counters.scanned += scanned

        batched_upward_search(self.ch.up, [(p, 0) for p, _ in batch], visit,
                              limit=delta_max, counters=counters)
