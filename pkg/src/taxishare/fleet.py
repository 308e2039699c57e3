"""Vehicle routes: stop schedules, deadlines, leeways and route mutation."""
from dataclasses import dataclass, field

from .cost import merges_pickup
from .graph import VEH
from .kernels import INF, sssp_parents


@dataclass
class Rider:
    rid: int
    t_req: int
    origin: int
    destination: int
    pickup: int
    dropoff: int
    walk_p: int
    walk_d: int
    vehicle: int
    # latest departure from the pickup stop and latest arrival at the dropoff stop
    wait_deadline: int = INF
    arrival_deadline: int = INF
    board_time: int = None
    arrival_time: int = None


@dataclass
class Stop:
    location: int
    t_arr: int
    t_dep: int
    occ_after: int = 0
    pickups: list = field(default_factory=list)
    dropoffs: list = field(default_factory=list)
    # latest time a rider boarding here is ready (walk finished); -INF if none
    ready: int = -INF
    pickup_deadline: int = INF
    dropoff_deadline: int = INF
    t_arr_max: int = INF

    @property
    def num_dropoffs(self):
        return len(self.dropoffs)

    def copy(self):
        return Stop(self.location, self.t_arr, self.t_dep, self.occ_after, list(self.pickups),
                    list(self.dropoffs), self.ready, self.pickup_deadline, self.dropoff_deadline,
                    self.t_arr_max)


class RouteError(RuntimeError):
    pass


@dataclass
class StopEvent:
    vehicle: int
    kind: str  # "depart" or "arrive"
    location: int
    time: int
    riders: list


@dataclass
class ChangeSummary:
    first_changed: int
    last_stop_changed: bool
    old_last: int
    new_last: int
    pickup_index: int
    dropoff_index: int
    events: list = field(default_factory=list)


class VehicleRoute:
    def __init__(self, vid, location, service_start, service_end, capacity):
        self.vid = vid
        self.capacity = capacity
        self.service_start = service_start
        self.service_end = service_end
        self.stops = [Stop(location, service_start, service_start)]
        self.leeway = []
        self.op_time = 0
        self.drive_time = 0
        self.occupied_drive = 0
        # completed legs: (from, to, arrival at from, departure, arrival at to, occupancy)
        self.legs = []
        self._leg0 = None
        self.recompute_deadlines_and_leeways()

    @property
    def m(self):
        return len(self.stops) - 1

    @property
    def last(self):
        return self.stops[-1]

    def leg_length(self, a):
        return self.stops[a + 1].t_arr - self.stops[a].t_dep

    def vehicle_wait(self, a):
        return self.stops[a].t_dep - self.stops[a].t_arr

    def copy(self):
        other = VehicleRoute.__new__(VehicleRoute)
        other.__dict__.update(self.__dict__)
        other.stops = [s.copy() for s in self.stops]
        other.leeway = list(self.leeway)
        other.legs = list(self.legs)
        return other

    def recompute_deadlines_and_leeways(self, riders=None):
        """Refresh per-stop latest arrivals and per-leg leeways in one backward pass.

        The slack of stop ``a`` is the largest arrival delay it can absorb:
        its own deadline slack, or the next stop's slack plus the wait buffer
        at ``a``.  The leeway of leg ``a`` is the slack of stop ``a + 1``.
        """
        stops = self.stops
        m = len(stops) - 1
        if riders is not None:
            for s in stops:
                s.pickup_deadline = min((riders[r].wait_deadline for r in s.pickups), default=INF)
                s.dropoff_deadline = min((riders[r].arrival_deadline for r in s.dropoffs), default=INF)
        for a, s in enumerate(stops):
            s.t_arr_max = min(s.pickup_deadline, s.dropoff_deadline)
            if a == m:
                s.t_arr_max = min(s.t_arr_max, self.service_end)
        self.leeway = [0] * m
        if m == 0:
            return
        slack = stops[m].t_arr_max - stops[m].t_arr
        for a in range(m - 1, -1, -1):
            if slack < 0:
                raise RouteError(f"vehicle {self.vid}: stop {a + 1} misses its deadline")
            self.leeway[a] = slack
            if a == 0:
                break
            s = stops[a]
            slack = min(s.t_arr_max - s.t_arr, slack + s.t_dep - s.t_arr)

    def refresh_idle(self, now):
        """An idle vehicle cannot leave before now or before its service starts."""
        if len(self.stops) == 1:
            s = self.stops[0]
            t = max(now, self.service_start, s.t_arr)
            s.t_arr = s.t_dep = t

    def advance_to(self, now, riders):
        """Complete every stop reached by ``now``; returns the stop events."""
        events = []
        stops = self.stops
        while len(stops) > 1 and stops[1].t_arr <= now:
            s0, s1 = stops[0], stops[1]
            events.append(self._depart(s0, riders))
            self._account(s0, s1.location, s1.t_arr)
            stops.pop(0)
            for r in s1.dropoffs:
                riders[r].arrival_time = s1.t_arr
            events.append(StopEvent(self.vid, "arrive", s1.location, s1.t_arr, list(s1.dropoffs)))
            self._leg0 = None
        if events:
            self.recompute_deadlines_and_leeways()
        self.refresh_idle(now)
        return events

    def _depart(self, s0, riders):
        for r in s0.pickups:
            riders[r].board_time = s0.t_dep
        return StopEvent(self.vid, "depart", s0.location, s0.t_dep, list(s0.pickups))

    def _account(self, s0, location, arrival):
        self.legs.append((s0.location, location, s0.t_arr, s0.t_dep, arrival, s0.occ_after))
        self.op_time += arrival - s0.t_arr
        self.drive_time += arrival - s0.t_dep
        self.occupied_drive += s0.occ_after * (arrival - s0.t_dep)

    def current_location(self, now, net):
        """Next vertex reached on the current leg and the time it is reached.

        Positions inside an edge round forward to the edge's head.
        """
        s0 = self.stops[0]
        if len(self.stops) == 1:
            return s0.location, max(now, s0.t_dep)
        if now <= s0.t_dep:
            return s0.location, s0.t_dep
        verts, times = self._leg0_path(net)
        for v, t in zip(verts, times):
            if t >= now:
                return v, t
        return verts[-1], times[-1]

    def _leg0_path(self, net):
        s0, s1 = self.stops[0], self.stops[1]
        key = (s0.location, s1.location, s0.t_dep)
        if self._leg0 is None or self._leg0[0] != key:
            g = net.graph(VEH)
            dist, parent = sssp_parents(g.indptr, g.heads, g.weights, s0.location)
            path = [s1.location]
            while path[-1] != s0.location:
                path.append(int(parent[path[-1]]))
            path.reverse()
            if dist[s1.location] != s1.t_arr - s0.t_dep:
                raise RouteError(f"vehicle {self.vid}: leg 0 length disagrees with shortest path")
            times = [s0.t_dep + int(dist[v]) for v in path]
            self._leg0 = (key, path, times)
        return self._leg0[1], self._leg0[2]

    def apply_insertion(self, ins, rider, riders, trip_deadline):
        """Insert ``rider`` per ``ins`` using residual detours; returns a ChangeSummary.

        ``rider.wait_deadline`` and ``trip_deadline`` hold the soft limits of
        the new rider; once committed they become hard, relaxed to the
        planned times if those already overshoot.
        """
        stops = self.stops
        m = len(stops) - 1
        i, j = ins.i, ins.j
        old_last = stops[-1].location
        summary_events = []
        t_req = rider.t_req
        dep = max(ins.t_start + ins.d_ip, t_req + ins.walk_p)
        merged = merges_pickup(self, i, ins.pickup)
        res = [0] * (m + 1)
        base = stops[i].t_dep
        if i == j:
            arr_d = dep + ins.pd
            r = arr_d + ins.d_d_next - base - self.leg_length(i) if j < m else 0
        else:
            r = dep - base + ins.d_p_next - self.leg_length(i)
            for a in range(i + 1, j + 1):
                res[a] = r
                if a < j:
                    r = max(r - self.vehicle_wait(a), 0)
            dep_j = max(stops[j].t_arr + res[j], stops[j].t_dep)
            arr_d = dep_j + ins.d_jd
            if j < m:
                r = max(res[j] - self.vehicle_wait(j), 0) + ins.d_jd + ins.d_d_next - self.leg_length(j)
        for a in range(j + 1, m + 1):
            res[a] = r
            r = max(r - self.vehicle_wait(a), 0)
        for a in range(i + 1, m + 1):
            s = stops[a]
            s.t_arr += res[a]
            s.t_dep = max(s.t_arr, s.t_dep)

        rider.wait_deadline = max(rider.wait_deadline, dep)
        rider.arrival_deadline = max(trip_deadline, arr_d)

        new = list(stops)
        if merged:
            s_i = new[i]
            s_i.t_dep = dep
            s_i.pickups.append(rider.rid)
            s_i.ready = max(s_i.ready, t_req + ins.walk_p)
            s_i.occ_after += 1
            pidx = i
        else:
            if i == 0 and m > 0 and ins.curloc is not None:
                c, t_c = ins.curloc
                s0 = new[0]
                if c != s0.location or t_c != s0.t_dep:
                    summary_events.append(self._depart(s0, riders))
                    self._account(s0, c, t_c)
                    new[0] = Stop(c, t_c, t_c, s0.occ_after)
                    self._leg0 = None
            prev = new[i]
            pstop = Stop(ins.pickup, ins.t_start + ins.d_ip, dep, prev.occ_after + 1,
                         [rider.rid], [], t_req + ins.walk_p)
            new.insert(i + 1, pstop)
            pidx = i + 1
        # original stops strictly between pickup and dropoff carry the rider
        j_new = j + (pidx - i)
        for a in range(pidx + 1, j_new + 1):
            new[a].occ_after += 1
        dstop = Stop(ins.dropoff, arr_d, arr_d, new[j_new].occ_after - 1, [], [rider.rid])
        new.insert(j_new + 1, dstop)
        self.stops = new
        if i == 0:
            self._leg0 = None
        self.recompute_deadlines_and_leeways(riders)
        for a, s in enumerate(new):
            if s.occ_after > self.capacity:
                raise RouteError(f"vehicle {self.vid}: capacity exceeded at stop {a}")
            if a > 0 and s.t_arr > s.t_arr_max:
                raise RouteError(f"vehicle {self.vid}: stop {a} misses its deadline")
        return ChangeSummary(i, j == m, old_last, new[-1].location, pidx, j_new + 1, summary_events)


def rebuild_schedule(anchor_dep, legs, readies):
    """Arrival and departure times recomputed leg by leg from an anchor stop.

    ``legs[a]`` is the drive to stop ``a + 1`` and ``readies[a]`` the time the
    last rider boarding at stop ``a + 1`` is ready.
    """
    arr, dep = [], []
    t = anchor_dep
    for leg, ready in zip(legs, readies):
        a = t + leg
        d = max(a, ready)
        arr.append(a)
        dep.append(d)
        t = d
    return arr, dep
