"""Per-request dispatch: find the cheapest insertion and commit it.

Phases run in a fixed order and share one upper bound ``c_upper`` seeded by
the walking-only cost: elliptic queries, pickup-to-dropoff distances,
ordinary and paired insertions, pickups before the next stop, pickups after
the last stop, and dropoffs after the last stop.  Every phase only prunes
what is strictly worse than ``c_upper``, so equal-cost alternatives survive
and the global tie-break decides.
"""
from dataclasses import dataclass, field

from .buckets import TransientBucketStore
from .ch import SearchCounters, batched_upward_search, build_ch
from .cost import (DALS, OK, PALS, PAIRED, PBNS, ORDINARY, SERVICE_END, WALK,
                   CostModel, Insertion)
from .elliptic import EllipticBuckets, split_leg_id
from .fleet import Rider, VehicleRoute
from .graph import PSG, distances_from, find_meeting_points
from .kernels import INF
from .lastleg import (LastStopBuckets, SearchEnv, dals_collective, dals_individual,
                      group_by_vehicle, pals_collective, pals_individual, pareto_dropoffs)
from .pdcalc import PdCalculator, pd_max_bound

PHASES = ("elliptic", "pd", "ordinary", "pbns", "pals", "dals")


@dataclass
class DispatchResult:
    insertion: Insertion
    num_pickups: int
    num_dropoffs: int
    counters: dict
    evaluated: int = 0
    pals_fallback: bool = False
    dals_fallback: bool = False
    phase_bounds: list = field(default_factory=list)


class DistanceTrace:
    """Collects every distance a dispatch reports, for exactness checks."""

    def __init__(self):
        self.items = []

    def add(self, phase, source, target, dist):
        self.items.append((phase, source, target, dist))


class DispatchState:
    def __init__(self, instance, ch=None, config=None):
        self.net = instance.network
        self.cfg = config or instance.config
        self.ch = ch if ch is not None else build_ch(self.net)
        self.model = CostModel(self.cfg.weights())
        self.routes = [VehicleRoute(vid, rec.initial_location, rec.service_start, rec.service_end,
                                    rec.capacity)
                       for vid, rec in enumerate(instance.vehicles)]
        self.riders = {}
        self.now = 0
        sorted_buckets = self.cfg.sorted_buckets
        self.elliptic = EllipticBuckets(self.ch, sorted_buckets, self.cfg.elliptic_pruning)
        self.laststop = LastStopBuckets(self.ch, sorted_buckets)
        self.pdcalc = PdCalculator(self.ch, sorted_buckets)
        self.curloc_store = TransientBucketStore(self.ch.n, sorted_buckets)
        for route in self.routes:
            self.laststop.update(route.vid, route.last.location)

    def advance(self, now):
        """Move every vehicle to ``now``; returns the stop events that happened."""
        self.now = now
        events = []
        for route in self.routes:
            ev = route.advance_to(now, self.riders)
            if ev:
                self.elliptic.update_vehicle(route)
                events += ev
        return events

    def rebuilt_buckets(self):
        """Bucket contents regenerated from scratch, for coherence checks."""
        ell = EllipticBuckets(self.ch, self.cfg.sorted_buckets, self.cfg.elliptic_pruning)
        last = LastStopBuckets(self.ch, self.cfg.sorted_buckets)
        for route in self.routes:
            ell.update_vehicle(route)
            last.update(route.vid, route.last.location)
        return ell, last

    def buckets_coherent(self):
        ell, last = self.rebuilt_buckets()
        return (ell.source.snapshot() == self.elliptic.source.snapshot()
                and ell.target.snapshot() == self.elliptic.target.snapshot()
                and last.store.snapshot() == self.laststop.store.snapshot())

    def trip_deadline(self, ins, ctx):
        limit = ctx.trip_limit_num
        if limit >= INF:
            return INF
        return ctx.t_req - ins.walk_d + limit // self.model.a_den

    def commit(self, rid, request, ins, ctx):
        """Apply the chosen insertion; returns the new rider and any stop events."""
        if ins.kind == WALK:
            rider = Rider(rid, request.t_req, request.origin, request.destination,
                          request.origin, request.destination, ins.walk_p, 0, -1)
            rider.arrival_time = request.t_req + ins.walk_p if ins.walk_p < INF else INF
            self.riders[rid] = rider
            return rider, []
        route = self.routes[ins.vehicle]
        rider = Rider(rid, request.t_req, request.origin, request.destination, ins.pickup,
                      ins.dropoff, ins.walk_p, ins.walk_d, ins.vehicle,
                      wait_deadline=request.t_req + self.cfg.t_wait_max)
        self.riders[rid] = rider
        summary = route.apply_insertion(ins, rider, self.riders, self.trip_deadline(ins, ctx))
        self.elliptic.update_vehicle(route)
        self.laststop.update(route.vid, route.last.location)
        return rider, summary.events

    def curloc_distances(self, pairs, counters=None):
        """Exact ``dist(c, p)`` for ``(c, p)`` vertex pairs via transient source buckets."""
        if not pairs:
            return {}
        sources = sorted({c for c, _ in pairs})
        targets = sorted({p for _, p in pairs})
        store = self.curloc_store
        store.clear()
        for q, c in enumerate(sources):
            for v, d in self.ch.forward_space(c):
                store.insert_entry(v, q, d)
        out = {}
        k = self.cfg.k_elliptic
        for start in range(0, len(targets), k):
            batch = targets[start:start + k]

            def visit(u, labels, lanes, batch=batch):
                def record(entry):
                    c = sources[entry[1]]
                    for l in lanes:
                        key = (c, batch[l])
                        tent = entry[2] + labels[l]
                        if tent < out.get(key, INF):
                            out[key] = tent

                scanned = store.scan(u, record)
                if counters is not None:
                    counters.scanned += scanned

            batched_upward_search(self.ch.down, [(p, 0) for p in batch], visit, counters=counters)
        store.clear()
        return {pair: out.get(pair, INF) for pair in pairs}


class _Search:
    """Scratch state of one dispatch."""

    def __init__(self, state, rid, request, trace):
        self.state = state
        self.cfg = state.cfg
        self.model = state.model
        self.routes = state.routes
        self.trace = trace
        self.request = request
        self.now = request.t_req
        net = state.net
        o, d = request.origin, request.destination
        self.ctx = self.model.context(rid, o, d, request.t_req, state.ch.distance(o, d))
        self.pickups = find_meeting_points(net, o, self.cfg.rho, "pickup")
        self.dropoffs = find_meeting_points(net, d, self.cfg.rho, "dropoff")
        self.counters = {ph: SearchCounters() for ph in PHASES}
        self.evaluated = 0
        self.bounds = []
        walk = int(distances_from(net, PSG, o)[d])
        cost = self.model.walking_only(self.ctx, walk)
        self.best = Insertion(WALK, -1, -1, -1, o, walk, d, 0, cost=cost)
        self.curloc = {}

    @property
    def c_upper(self):
        return self.best.cost

    def bound_for_pruning(self):
        return self.c_upper if self.cfg.cost_pruning else INF

    def consider(self, ins):
        self.evaluated += 1
        status, cost = self.model.evaluate(self.routes[ins.vehicle], ins, self.ctx,
                                           self.bound_for_pruning())
        if status == OK:
            ins.cost = cost
            if ins.sort_key() < self.best.sort_key():
                self.best = ins
        return status

    def pickup_lb(self, walk_p, dep, pd_min):
        m = self.model
        off = dep - self.ctx.t_req
        return m.w_walk * walk_p + m.wait_vio(off) + m.w_trip * (off + pd_min)

    def pickup_pruned(self, walk_p, dep, pd_min):
        return self.cfg.cost_pruning and self.pickup_lb(walk_p, dep, pd_min) > self.c_upper

    def record(self, phase, source, target, dist):
        if self.trace is not None and dist < INF:
            self.trace.add(phase, source, target, dist)

    # -- phases ---------------------------------------------------------

    def run(self):
        if not self.pickups or not self.dropoffs:
            return
        self.elliptic_phase()
        self.pd_phase()
        self.bounds.append(self.c_upper)
        self.ordinary_phase()
        self.bounds.append(self.c_upper)
        self.pbns_phase()
        self.bounds.append(self.c_upper)
        self.pals_phase()
        self.bounds.append(self.c_upper)
        self.dals_phase()
        self.bounds.append(self.c_upper)

    def elliptic_phase(self):
        ell = self.state.elliptic
        k = self.cfg.k_elliptic
        cnt = self.counters["elliptic"]
        tables = {}
        for name, pts in (("p", self.pickups), ("d", self.dropoffs)):
            for side in ("to", "from"):
                raw = ell.query(pts, side, k, cnt)
                by_leg = {}
                for sid, row in raw.items():
                    by_leg[split_leg_id(sid)] = row
                    vid, a = split_leg_id(sid)
                    stops = self.routes[vid].stops
                    for idx, dist in row.items():
                        if side == "to":
                            self.record("elliptic", stops[a].location, pts[idx][0], dist)
                        else:
                            self.record("elliptic", pts[idx][0], stops[a + 1].location, dist)
                tables[name + side] = by_leg
        self.to_p, self.from_p = tables["pto"], tables["pfrom"]
        self.to_d, self.from_d = tables["dto"], tables["dfrom"]
        vehicles = set()
        for t in tables.values():
            vehicles.update(vid for vid, _ in t)
        self.elliptic_vehicles = sorted(vehicles)

    def pd_phase(self):
        st = self.state
        o, d = self.request.origin, self.request.destination
        delta_max = pd_max_bound(st.net, st.ch, o, d, self.pickups, self.dropoffs)
        self.pd = st.pdcalc.distances(self.pickups, self.dropoffs, delta_max, self.cfg.k_pd,
                                      self.counters["pd"])
        self.pd_rows = self.pd.dist.tolist()
        self.pd_min = self.pd.row_min()
        for a, (p, _) in enumerate(self.pickups):
            for b, (q, _) in enumerate(self.dropoffs):
                self.record("pd", p, q, self.pd_rows[a][b])

    def _dropoff_options(self, vid, j):
        to, frm = self.to_d.get((vid, j)), self.from_d.get((vid, j))
        if not to or not frm:
            return []
        return [(b, to[b], frm[b]) for b in sorted(to) if b in frm]

    def _enumerate_after_pickup(self, route, base, i, d_pnext):
        """Dropoffs at legs ``j > i`` (below the last stop) for a fixed pickup."""
        vid, m = route.vid, route.m
        if d_pnext is None:
            return
        for j in range(i + 1, m):
            for b, d_jd, d_dnext in self._dropoff_options(vid, j):
                walk_d = self.dropoffs[b][1]
                self.consider(Insertion(
                    PBNS if i == 0 else ORDINARY, vid, i, j, base.pickup, base.walk_p,
                    self.dropoffs[b][0], walk_d, d_ip=base.d_ip, d_p_next=d_pnext, d_jd=d_jd,
                    d_d_next=d_dnext, t_start=base.t_start, curloc=base.curloc))

    def _enumerate_paired(self, route, base, a, i):
        frm = self.from_d.get((route.vid, i))
        if not frm:
            return
        row = self.pd_rows[a]
        for b in sorted(frm):
            if row[b] >= INF:
                continue
            self.consider(Insertion(
                PBNS if i == 0 else PAIRED, route.vid, i, i, base.pickup, base.walk_p,
                self.dropoffs[b][0], self.dropoffs[b][1], d_ip=base.d_ip, pd=row[b],
                d_d_next=frm[b], t_start=base.t_start, curloc=base.curloc))

    def ordinary_phase(self):
        for vid in self.elliptic_vehicles:
            route = self.routes[vid]
            for i in range(1, route.m):
                to = self.to_p.get((vid, i))
                if not to:
                    continue
                frm = self.from_p.get((vid, i), {})
                t_start = route.stops[i].t_dep
                for a in sorted(to):
                    p, walk_p = self.pickups[a]
                    dep = max(t_start + to[a], self.ctx.t_req + walk_p)
                    if self.pickup_pruned(walk_p, dep, self.pd_min[a]):
                        continue
                    base = Insertion(ORDINARY, vid, i, i, p, walk_p, -1, 0, d_ip=to[a],
                                     t_start=t_start)
                    self._enumerate_paired(route, base, a, i)
                    self._enumerate_after_pickup(route, base, i, frm.get(a))

    def _curloc(self, route):
        c, t_c = route.current_location(self.now, self.state.net)
        return c, t_c

    def _exact_from_curloc(self, survivors):
        """Fill ``self.curloc`` with exact vehicle-location-to-pickup distances."""
        need = set()
        for vid, a, _ in survivors:
            route = self.routes[vid]
            c, t_c = self._curloc(route)
            s0 = route.stops[0]
            key = (c, self.pickups[a][0])
            if key in self.curloc:
                continue
            if c == s0.location and t_c == s0.t_dep:
                continue
            need.add(key)
        found = self.state.curloc_distances(sorted(need), self.counters["pbns"])
        for key, dist in found.items():
            self.curloc[key] = dist
            self.record("curloc", key[0], key[1], dist)

    def _pbns_base(self, vid, a, d_s0p, kind):
        route = self.routes[vid]
        c, t_c = self._curloc(route)
        s0 = route.stops[0]
        p, walk_p = self.pickups[a]
        if c == s0.location and t_c == s0.t_dep:
            d_cp = d_s0p
        else:
            d_cp = self.curloc[(c, p)]
        return Insertion(kind, vid, 0, 0, p, walk_p, -1, 0, d_ip=d_cp, t_start=t_c,
                         curloc=(c, t_c))

    def _pbns_survivors(self, vehicles):
        out = []
        for vid in vehicles:
            route = self.routes[vid]
            if route.m == 0:
                continue
            to = self.to_p.get((vid, 0))
            if not to:
                continue
            t0 = route.stops[0].t_dep
            for a in sorted(to):
                walk_p = self.pickups[a][1]
                dep = max(t0 + to[a], self.ctx.t_req + walk_p)
                if self.pickup_pruned(walk_p, dep, self.pd_min[a]):
                    continue
                out.append((vid, a, to[a]))
        return out

    def pbns_phase(self):
        survivors = self._pbns_survivors(self.elliptic_vehicles)
        self._exact_from_curloc(survivors)
        for vid, a, d_s0p in survivors:
            route = self.routes[vid]
            base = self._pbns_base(vid, a, d_s0p, PBNS)
            walk_p = base.walk_p
            dep = max(base.t_start + base.d_ip, self.ctx.t_req + walk_p)
            if self.pickup_pruned(walk_p, dep, self.pd_min[a]):
                continue
            self._enumerate_paired(route, base, a, 0)
            self._enumerate_after_pickup(route, base, 0, self.from_p.get((vid, 0), {}).get(a))

    def _env(self, phase):
        st = self.state
        return SearchEnv(st.ch, st.laststop, self.routes, self.model, self.ctx, self.cfg,
                         self.counters[phase])

    def _pals_enumerate(self, found):
        for (vid, a), x in sorted(found.items()):
            route = self.routes[vid]
            p, walk_p = self.pickups[a]
            self.record("laststop", route.last.location, p, x)
            row = self.pd_rows[a]
            for b, (q, walk_d) in enumerate(self.dropoffs):
                if row[b] >= INF:
                    continue
                self.consider(Insertion(PALS, vid, route.m, route.m, p, walk_p, q, walk_d,
                                        d_ip=x, pd=row[b], t_start=route.last.t_dep))

    def pals_phase(self):
        env = self._env("pals")
        self.pals_fallback = False
        if self.cfg.pals == "individual":
            found, _ = pals_individual(env, self.pickups, self.dropoffs, self.pd, self.c_upper)
            self._pals_enumerate(found)
            return
        outcome = pals_collective(env, self.pickups, self.dropoffs, self.pd, self.c_upper)
        self.pals_outcome = outcome
        if outcome.fallback:
            self.pals_fallback = True
            found, _ = pals_individual(env, self.pickups, self.dropoffs, self.pd,
                                       min(outcome.c_upper, self.c_upper))
            self._pals_enumerate(found)
            return
        best = outcome.best
        if best is None:
            return
        route = self.routes[best.vehicle]
        p, walk_p = self.pickups[best.pickup]
        q, walk_d = self.dropoffs[best.dropoff]
        self.record("laststop", route.last.location, p, best.dist)
        self.consider(Insertion(PALS, best.vehicle, route.m, route.m, p, walk_p, q, walk_d,
                                d_ip=best.dist, pd=self.pd_rows[best.pickup][best.dropoff],
                                t_start=route.last.t_dep))

    def _dals_pickups(self, route):
        """Pickup options ``(i, Insertion stub)`` for a dropoff after the last stop."""
        vid, m = route.vid, route.m
        opts = []
        for i in range(1, m):
            to, frm = self.to_p.get((vid, i)), self.from_p.get((vid, i))
            if not to or not frm:
                continue
            t_start = route.stops[i].t_dep
            for a in sorted(to):
                if a not in frm:
                    continue
                p, walk_p = self.pickups[a]
                dep = max(t_start + to[a], self.ctx.t_req + walk_p)
                if self.pickup_pruned(walk_p, dep, 0):
                    continue
                opts.append((Insertion(DALS, vid, i, m, p, walk_p, -1, 0, d_ip=to[a],
                                       t_start=t_start), frm[a]))
        frm0 = self.from_p.get((vid, 0), {})
        survivors = [(v, a, d) for v, a, d in self._pbns_survivors([vid]) if a in frm0]
        self._exact_from_curloc(survivors)
        for _, a, d_s0p in survivors:
            base = self._pbns_base(vid, a, d_s0p, DALS)
            base.j = m
            opts.append((base, frm0[a]))
        return opts

    def _dals_enumerate(self, per_vehicle):
        saw_service_end = False
        for vid in sorted(per_vehicle):
            entries = per_vehicle[vid]
            if not entries:
                continue
            route = self.routes[vid]
            for b, x in entries.items():
                self.record("laststop", route.last.location, self.dropoffs[b][0], x)
            for base, d_pnext in self._dals_pickups(route):
                for b in sorted(entries):
                    q, walk_d = self.dropoffs[b]
                    status = self.consider(Insertion(
                        DALS, vid, base.i, route.m, base.pickup, base.walk_p, q, walk_d,
                        d_ip=base.d_ip, d_p_next=d_pnext, d_jd=entries[b],
                        t_start=base.t_start, curloc=base.curloc))
                    saw_service_end |= status == SERVICE_END
        return saw_service_end

    def dals_phase(self):
        env = self._env("dals")
        self.dals_fallback = False
        bound = self.bound_for_pruning()
        if self.cfg.dals == "collective":
            found = dals_collective(env, self.dropoffs, bound)
        else:
            found = dals_individual(env, self.dropoffs, bound)
        grouped = group_by_vehicle(found)
        filtered = self.cfg.dropoff_domination
        if filtered:
            grouped = pareto_dropoffs(self.model, self.dropoffs, grouped)
        if self._dals_enumerate(grouped) and filtered:
            # a dominating dropoff overran the service end; retry without domination
            self.dals_fallback = True
            raw = group_by_vehicle(dals_individual(env, self.dropoffs, bound))
            self._dals_enumerate(raw)


def dispatch_request(state, rid, request, trace=None):
    """Cheapest insertion for ``request`` against the current fleet state."""
    search = _Search(state, rid, request, trace)
    search.run()
    counters = {ph: (c.scanned, c.relaxed) for ph, c in search.counters.items()}
    result = DispatchResult(search.best, len(search.pickups), len(search.dropoffs), counters,
                            search.evaluated, getattr(search, "pals_fallback", False),
                            getattr(search, "dals_fallback", False), search.bounds)
    result.context = search.ctx
    result.search = search
    return result
