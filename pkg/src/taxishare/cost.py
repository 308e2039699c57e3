"""Insertion costs in exact scaled integers.

Every cost here is the true cost multiplied by ``CostWeights.scale``.  The
trip-time limit is kept multiplied by the alpha denominator so the soft
trip penalty never needs a division.
"""
from dataclasses import dataclass

from .kernels import INF

OK, INFEASIBLE, SERVICE_END, PRUNED = 0, 1, 2, 3

WALK, ORDINARY, PAIRED, PBNS, PALS, DALS = "walk", "ordinary", "paired", "pbns", "pals", "dals"
# walking wins ties because no insertion strictly beats it
TYPE_RANK = {WALK: 0, ORDINARY: 1, PAIRED: 2, PBNS: 3, PALS: 4, DALS: 5}
TYPE_LABEL = {WALK: "WalkOnly", ORDINARY: "Ordinary", PAIRED: "OP", PBNS: "PBNS",
              PALS: "PALS", DALS: "DALS"}


def insertion_type(i, j, m):
    if m == 0 or (i == j == m):
        return PALS
    if j == m:
        return DALS
    if i == 0:
        return PBNS
    if i == j:
        return PAIRED
    return ORDINARY


@dataclass(frozen=True)
class RequestContext:
    rid: int
    origin: int
    destination: int
    t_req: int
    # alpha_den * maximum trip time; INF when the direct drive is impossible
    trip_limit_num: int
    direct_dist: int


@dataclass
class Insertion:
    """A candidate ``(request, pickup, dropoff, vehicle, i, j)`` and its inputs.

    ``t_start`` is when the vehicle leaves the anchor of the pickup leg and
    ``d_ip`` the distance from that anchor to the pickup; for a pickup before
    the next stop the anchor is the vehicle's current location ``curloc``.
    """
    kind: str
    vehicle: int
    i: int
    j: int
    pickup: int
    walk_p: int
    dropoff: int
    walk_d: int
    d_ip: int = 0
    d_p_next: int = INF
    pd: int = INF
    d_jd: int = INF
    d_d_next: int = INF
    t_start: int = 0
    curloc: tuple = None
    cost: int = INF

    def sort_key(self):
        return (self.cost, TYPE_RANK[self.kind], self.vehicle, self.i, self.j,
                self.pickup, self.dropoff)


@dataclass(frozen=True)
class CostBreakdown:
    t_detour: int
    t_trip: int
    t_trip_plus: int
    t_walk: int
    c_wait_vio: int
    c_trip_vio: int
    total: int
    t_dep: int = None
    t_arr_dropoff: int = None


def departure_at_pickup(t_dep_min_si, dist_veh_si_p, t_req, walk_p):
    return max(t_dep_min_si + dist_veh_si_p, t_req + walk_p)


def merges_pickup(route, i, pickup):
    """Pickups at the anchor stop's vertex join that stop instead of adding one.

    The current stop of a moving vehicle is excluded: it may already be left.
    """
    return route.stops[i].location == pickup and not (i == 0 and len(route.stops) > 1)


class CostModel:
    def __init__(self, weights):
        self.w = weights
        cfg = weights.cfg
        self.cfg = cfg
        self.w_detour = weights.w_detour
        self.w_trip = weights.w_trip
        self.w_walk = weights.w_walk
        self.w_wait = weights.w_wait_vio
        self.w_trip_vio = weights.w_trip_vio
        self.w_trip_vio_unit = weights.w_trip_vio_per_unit
        self.a_den = weights.alpha_den
        self.t_wait_max = cfg.t_wait_max

    def context(self, rid, origin, destination, t_req, direct_dist):
        return RequestContext(rid, origin, destination, t_req,
                              self.w.trip_limit_num(direct_dist, INF), direct_dist)

    def trip_vio(self, ctx, trip):
        if ctx.trip_limit_num >= INF:
            return 0
        excess = self.a_den * trip - ctx.trip_limit_num
        return self.w_trip_vio * excess if excess > 0 else 0

    def wait_vio(self, dep_offset):
        excess = dep_offset - self.t_wait_max
        return self.w_wait * excess if excess > 0 else 0

    def total(self, ctx, detour, trip, trip_plus, walk, dep_offset):
        return (self.w_detour * detour + self.w_trip * (trip + trip_plus) + self.w_walk * walk
                + self.wait_vio(dep_offset) + self.trip_vio(ctx, trip))

    def breakdown(self, ctx, detour, trip, trip_plus, walk, dep, arr_d):
        wv = self.wait_vio(dep - ctx.t_req)
        tv = self.trip_vio(ctx, trip)
        total = self.w_detour * detour + self.w_trip * (trip + trip_plus) + self.w_walk * walk + wv + tv
        return CostBreakdown(detour, trip, trip_plus, walk, wv, tv, total, dep, arr_d)

    def walking_only(self, ctx, dist_psg):
        """Cost of walking the whole way; no wait penalty applies."""
        if dist_psg >= INF:
            return INF
        return (self.w_trip + self.w_walk) * dist_psg + self.trip_vio(ctx, dist_psg)

    def walking_breakdown(self, ctx, dist_psg):
        if dist_psg >= INF:
            return CostBreakdown(0, INF, 0, INF, 0, 0, INF)
        tv = self.trip_vio(ctx, dist_psg)
        return CostBreakdown(0, dist_psg, 0, dist_psg, 0, tv, self.walking_only(ctx, dist_psg))

    def cost_from_last_stop(self, ctx, walk_p, pd, walk_d, t_dep_last, dist_last_to_p):
        """Exact cost of a pickup-after-last-stop insertion (service end unchecked)."""
        if dist_last_to_p >= INF or pd >= INF:
            return INF
        t_req = ctx.t_req
        dep = max(t_dep_last + dist_last_to_p, t_req + walk_p)
        arr = dep + pd
        trip = arr + walk_d - t_req
        return (self.w_detour * (arr - t_dep_last) + self.w_trip * trip
                + self.w_walk * (walk_p + walk_d) + self.wait_vio(dep - t_req) + self.trip_vio(ctx, trip))

    def lb_pals(self, ctx, walk_p, pd, walk_d, x):
        """Lower bound on any last-stop pickup cost whose last-stop distance is at least ``x``.

        Valid for every departure time of the last stop not before the request.
        """
        if x >= INF or pd >= INF:
            return INF
        dep_off = x if x > walk_p else walk_p
        trip = dep_off + pd + walk_d
        return (self.w_detour * (x + pd) + self.w_trip * trip + self.w_walk * (walk_p + walk_d)
                + self.wait_vio(dep_off) + self.trip_vio(ctx, trip))

    def lb_pals_curve(self, ctx, walk_p, pd, walk_d):
        """``lb_pals`` with the label's fixed terms folded in: a function of ``x`` alone."""
        if pd >= INF:
            return lambda x: INF
        w_detour, w_trip, w_wait = self.w_detour, self.w_trip, self.w_wait
        wait_max = self.t_wait_max
        const = w_detour * pd + w_trip * (pd + walk_d) + self.w_walk * (walk_p + walk_d)
        tail = pd + walk_d
        limit = ctx.trip_limit_num
        a_den, w_vio = self.a_den, self.w_trip_vio

        def lb(x):
            if x >= INF:
                return INF
            dep_off = x if x > walk_p else walk_p
            c = const + w_detour * x + w_trip * dep_off
            if dep_off > wait_max:
                c += w_wait * (dep_off - wait_max)
            if limit < INF:
                excess = a_den * (dep_off + tail) - limit
                if excess > 0:
                    c += w_vio * excess
            return c

        return lb

    def lb_dals(self, ctx, walk_d, x):
        """Lower bound on a dropoff-after-last-stop cost with last-stop distance ``x``."""
        if x >= INF:
            return INF
        trip = x + walk_d
        return (self.w_detour * x + self.w_trip * trip + self.w_walk * walk_d
                + self.trip_vio(ctx, trip))

    def pd_label_dominates(self, walk_p1, pd1, walk_d1, down1, walk_p2, pd2, walk_d2, down2):
        """Sufficient test that label 1 beats label 2 for every later vehicle arrival."""
        d_dep = max(down1, walk_p1) - down2
        d_detour = d_dep + pd1 - pd2
        d_trip = d_detour + walk_d1 - walk_d2
        d_walk = walk_p1 + walk_d1 - walk_p2 - walk_d2
        delta = (self.w_detour * d_detour + self.w_trip * d_trip + self.w_walk * d_walk
                 + self.w_wait * max(d_dep, 0) + self.w_trip_vio_unit * max(d_trip, 0))
        return delta < 0

    def dropoff_label_dominates(self, walk_d1, down1, walk_d2, down2):
        diff = down1 - down2
        d_walk = walk_d1 - walk_d2
        d_trip = diff + d_walk
        base = self.w_detour * diff + self.w_trip * d_trip + self.w_walk * d_walk
        return base < 0 and base + self.w_trip_vio_unit * d_trip < 0

    def evaluate(self, route, ins, ctx, c_upper=INF, detail=False):
        """Hard-constraint check and cost of ``ins`` on ``route``.

        Returns ``(status, cost)`` or, with ``detail``, ``(status, breakdown)``.
        ``SERVICE_END`` marks an insertion whose only violation is a new last
        stop reached after the end of service.
        """
        stops = route.stops
        m = len(stops) - 1
        i, j = ins.i, ins.j
        if ins.d_ip >= INF or (ins.pd if i == j else max(ins.d_p_next, ins.d_jd)) >= INF \
                or (j < m and ins.d_d_next >= INF):
            return INFEASIBLE, INF
        cap = route.capacity
        for a in range(i, j + 1):
            if stops[a].occ_after >= cap:
                return INFEASIBLE, INF
        t_req = ctx.t_req
        s_i = stops[i]
        base = s_i.t_dep
        dep = ins.t_start + ins.d_ip
        ready = t_req + ins.walk_p
        if ready > dep:
            dep = ready
        if s_i.location == ins.pickup and not (i == 0 and m > 0) and dep > s_i.pickup_deadline:
            return INFEASIBLE, INF
        walk = ins.walk_p + ins.walk_d
        dep_off = dep - t_req
        if c_upper < INF:
            lb = self.w_walk * walk + self.wait_vio(dep_off) + self.w_trip * (dep_off + ins.walk_d)
            if lb > c_upper:
                return PRUNED, INF
        trip_plus = 0
        if i == j:
            arr_d = dep + ins.pd
            if j == m:
                detour = arr_d - stops[m].t_dep
                r = None
            else:
                r = arr_d + ins.d_d_next - base - (stops[i + 1].t_arr - base)
                a0 = i + 1
        else:
            r = dep - base + ins.d_p_next - (stops[i + 1].t_arr - base)
            for a in range(i + 1, j + 1):
                s = stops[a]
                if r > 0:
                    if s.t_arr + r > s.t_arr_max:
                        return INFEASIBLE, INF
                    trip_plus += s.num_dropoffs * r
                if a < j:
                    r -= s.t_dep - s.t_arr
                    if r < 0:
                        r = 0
            s_j = stops[j]
            dep_j = s_j.t_arr + r
            if s_j.t_dep > dep_j:
                dep_j = s_j.t_dep
            arr_d = dep_j + ins.d_jd
            if j == m:
                detour = arr_d - s_j.t_dep
                r = None
            else:
                r -= s_j.t_dep - s_j.t_arr
                if r < 0:
                    r = 0
                r += ins.d_jd + ins.d_d_next - (stops[j + 1].t_arr - s_j.t_dep)
                a0 = j + 1
        if r is None:
            if arr_d > route.service_end:
                return SERVICE_END, INF
        else:
            detour = 0
            for a in range(a0, m + 1):
                if r <= 0:
                    break
                s = stops[a]
                if s.t_arr + r > s.t_arr_max:
                    return INFEASIBLE, INF
                trip_plus += s.num_dropoffs * r
                if a == m:
                    detour = r
                r -= s.t_dep - s.t_arr
        trip = arr_d + ins.walk_d - t_req
        if detail:
            return OK, self.breakdown(ctx, detour, trip, trip_plus, walk, dep, arr_d)
        return OK, self.total(ctx, detour, trip, trip_plus, walk, dep_off)
