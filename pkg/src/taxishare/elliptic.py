"""Elliptic bucket entries for route legs and the batched queries over them.

Leg ``a`` of vehicle ``vid`` runs from stop ``a`` to stop ``a + 1`` and has
stop id ``vid << LEG_BITS | a``.  Source entries live in the forward CH
space of stop ``a`` and answer ``dist(s_a, x)``; target entries live in the
reverse space of stop ``a + 1`` and answer ``dist(x, s_{a+1})``.  An entry
exists only where its distance fits the leg's radius, which is the leg
length plus its leeway: any point farther away than that cannot be
inserted on the leg without breaking a deadline.
"""
from .buckets import BucketStore
from .ch import batched_upward_search
from .kernels import INF

LEG_BITS = 12
LEG_MASK = (1 << LEG_BITS) - 1


def leg_id(vid, a):
    return vid << LEG_BITS | a


def split_leg_id(stop_id):
    return stop_id >> LEG_BITS, stop_id & LEG_MASK


def leg_radius(route, a, pruning=True):
    if not pruning:
        return INF
    return route.leg_length(a) + route.leeway[a]


class EllipticBuckets:
    def __init__(self, ch, sorted_buckets=True, pruning=True):
        self.ch = ch
        self.pruning = pruning
        self.source = BucketStore(ch.n, sorted_buckets)
        self.target = BucketStore(ch.n, sorted_buckets)
        # vid -> list of (store, vertex, stop id) currently inserted
        self._owned = {}
        self._radius = {}
        self.generated = 0

    @property
    def max_radius(self):
        return max(self._radius.values(), default=-1)

    def remove_vehicle(self, vid):
        for store, v, sid in self._owned.pop(vid, ()):
            store.remove_entries(v, sid)
        for key in [k for k in self._radius if k >> LEG_BITS == vid]:
            del self._radius[key]

    def update_vehicle(self, route):
        """Regenerate every entry of ``route`` from its current schedule."""
        self.remove_vehicle(route.vid)
        if route.m > LEG_MASK:
            raise ValueError(f"vehicle {route.vid}: too many stops for leg ids")
        owned = []
        stops = route.stops
        for a in range(route.m):
            radius = leg_radius(route, a, self.pruning)
            sid = leg_id(route.vid, a)
            self._radius[sid] = radius
            for v, d in self.ch.forward_space(stops[a].location):
                if d <= radius:
                    self.source.insert_entry(v, sid, d, key=d - radius)
                    owned.append((self.source, v, sid))
            for v, d in self.ch.reverse_space(stops[a + 1].location):
                if d <= radius:
                    self.target.insert_entry(v, sid, d, key=d - radius)
                    owned.append((self.target, v, sid))
        self.generated += len(owned)
        self._owned[route.vid] = owned
        return len(owned)

    def query(self, points, side, k=16, counters=None):
        """Distances between route stops and meeting points.

        ``side="to"`` yields ``dist(s_a, p)`` from source entries through
        reverse searches from the points; ``side="from"`` yields
        ``dist(p, s_{a+1})`` from target entries through forward searches.
        Returns ``{leg id: {point index: distance}}`` holding exactly the
        pairs whose distance fits the leg radius; all values are exact.
        """
        if side == "to":
            store, adj = self.source, self.ch.down
        elif side == "from":
            store, adj = self.target, self.ch.up
        else:
            raise ValueError(f"unknown side {side!r}")
        table = {}
        limit = self.max_radius
        if limit < 0:
            return table
        for start in range(0, len(points), k):
            batch = points[start:start + k]
            _elliptic_batch(store, adj, batch, start, limit, table, counters)
        return table


def _elliptic_batch(store, adj, batch, offset, limit, table, counters):
    def visit(u, labels, lanes):
        # entries are ordered by decreasing remaining leeway (key = -rem)
        low = min(labels[l] for l in lanes)

        def stop(entry):
            return low > -entry[0]

        def record(entry):
            key, sid, d_entry = entry
            radius = d_entry - key
            row = None
            for l in lanes:
                tent = d_entry + labels[l]
                if tent <= radius:
                    if row is None:
                        row = table.setdefault(sid, {})
                    p = offset + l
                    if tent < row.get(p, INF):
                        row[p] = tent

        scanned = store.scan(u, record, stop)
        if counters is not None:
            counters.scanned += scanned

    roots = [(v, 0) for v, _ in batch]
    batched_upward_search(adj, roots, visit, limit=limit, counters=counters)
