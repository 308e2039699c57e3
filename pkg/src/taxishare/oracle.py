"""Brute-force best insertion for verification.

Distances come from all-pairs Dijkstra matrices and every candidate route is
re-timed stop by stop from its anchor, checking each rider's deadline
directly.  Pickup/dropoff combinations are evaluated as numpy matrices.
"""
import numpy as np

from .cost import TYPE_RANK, WALK, Insertion, insertion_type
from .graph import PSG, VEH, all_pairs
from .kernels import INF

# stand-in for unreachable distances: large, yet sums of a few stay in int64
_BIG = 1 << 40


class Oracle:
    def __init__(self, net):
        self.net = net
        self.dist_veh = all_pairs(net, VEH)
        self.dist_psg = all_pairs(net, PSG)
        self._safe = np.where(self.dist_veh >= INF, _BIG, self.dist_veh)
        self._eligible = net.veh_eligible & net.psg_eligible

    def meeting_points(self, origin, destination, rho):
        pick = np.nonzero(self._eligible & (self.dist_psg[origin] <= rho))[0]
        drop = np.nonzero(self._eligible & (self.dist_psg[:, destination] <= rho))[0]
        return pick, self.dist_psg[origin, pick], drop, self.dist_psg[drop, destination]

    def best_insertion(self, state, request):
        """Cheapest insertion over every vehicle, index pair and meeting-point pair."""
        w = state.model.w
        t_req = request.t_req
        o, dest = request.origin, request.destination
        limit = w.trip_limit_num(int(self.dist_veh[o, dest]), INF)
        pick, walk_p, drop, walk_d = self.meeting_points(o, dest, state.cfg.rho)
        walking = int(self.dist_psg[o, dest])
        if walking >= INF:
            best_key, best = (INF, TYPE_RANK[WALK], -1, -1, -1, o, dest), None
        else:
            cost = (w.w_trip + w.w_walk) * walking + self._trip_vio(w, limit, walking)
            best_key, best = (int(cost), TYPE_RANK[WALK], -1, -1, -1, o, dest), None
        best_ins = Insertion(WALK, -1, -1, -1, o, walking, dest, 0, cost=best_key[0])
        if len(pick) == 0 or len(drop) == 0:
            return best_ins
        ctx = _Request(t_req, limit, pick, walk_p, drop, walk_d)
        for route in state.routes:
            m = route.m
            for i in range(m + 1):
                anchor = self._anchor(state, route, i)
                for j in range(i, m + 1):
                    found = self._evaluate(state, route, i, j, anchor, ctx)
                    if found is None:
                        continue
                    cost, a, b = found
                    kind = insertion_type(i, j, m)
                    key = (cost, TYPE_RANK[kind], route.vid, i, j, int(pick[a]), int(drop[b]))
                    if key < best_key:
                        best_key = key
                        best = (kind, route.vid, i, j, a, b)
        if best is None:
            return best_ins
        kind, vid, i, j, a, b = best
        ins = Insertion(kind, vid, i, j, int(pick[a]), int(walk_p[a]), int(drop[b]),
                        int(walk_d[b]), cost=best_key[0])
        self._attach_distances(state, ins)
        return ins

    def _attach_distances(self, state, ins):
        """Fill the leg distances so the insertion can be committed."""
        D = self.dist_veh
        route = state.routes[ins.vehicle]
        stops = route.stops
        m = route.m
        anchor_loc, ins.t_start = self._anchor(state, route, ins.i)
        if ins.i == 0 and m > 0:
            ins.curloc = (anchor_loc, ins.t_start)
        ins.d_ip = int(D[anchor_loc, ins.pickup])
        if ins.i == ins.j:
            ins.pd = int(D[ins.pickup, ins.dropoff])
        else:
            ins.d_p_next = int(D[ins.pickup, stops[ins.i + 1].location])
            ins.d_jd = int(D[stops[ins.j].location, ins.dropoff])
        if ins.j < m:
            ins.d_d_next = int(D[ins.dropoff, stops[ins.j + 1].location])

    @staticmethod
    def _trip_vio(w, limit, trip):
        if limit >= INF:
            return np.zeros_like(trip) if isinstance(trip, np.ndarray) else 0
        return w.w_trip_vio * np.maximum(w.alpha_den * np.asarray(trip) - limit, 0)

    def _anchor(self, state, route, i):
        if i == 0 and route.m > 0:
            return route.current_location(state.now, self.net)
        s = route.stops[i]
        return s.location, s.t_dep

    def _stop_limits(self, state, stop):
        riders = state.riders
        board = [riders[r] for r in stop.pickups]
        alight = [riders[r] for r in stop.dropoffs]
        ready = max((r.t_req + r.walk_p for r in board), default=-INF)
        wait_dl = min((r.wait_deadline for r in board), default=INF)
        arr_dl = min((r.arrival_deadline for r in alight), default=INF)
        return ready, wait_dl, arr_dl, len(alight)

    def _evaluate(self, state, route, i, j, anchor, rq):
        """Minimum cost and its (pickup, dropoff) indices for fixed ``(vehicle, i, j)``."""
        stops = route.stops
        m = route.m
        cap = route.capacity
        for a in range(i, j + 1):
            if stops[a].occ_after >= cap:
                return None
        D, S = self.dist_veh, self._safe
        loc = [s.location for s in stops]
        anchor_loc, anchor_dep = anchor
        t_req = rq.t_req
        ok = D[anchor_loc, rq.pick] < INF
        dep_p = np.maximum(anchor_dep + S[anchor_loc, rq.pick], t_req + rq.walk_p)
        if not (i == 0 and m > 0):
            merged = rq.pick == loc[i]
            if merged.any():
                wait_dl = self._stop_limits(state, stops[i])[1]
                ok &= ~merged | (dep_p <= wait_dl)
        trip_plus = 0
        old_end = stops[m].t_dep

        def through(t, start, stop_at, ok, trip_plus):
            """Re-time existing stops ``start..stop_at`` given arrival ``t`` at ``start``."""
            dep = t
            for a in range(start, stop_at + 1):
                ready, wait_dl, arr_dl, n_off = self._stop_limits(state, stops[a])
                arr = t
                ok = ok & (arr <= arr_dl)
                dep = np.maximum(arr, ready)
                if a > 0:
                    ok = ok & ((dep <= wait_dl) | (wait_dl >= INF))
                trip_plus = trip_plus + n_off * (arr - stops[a].t_arr)
                if a == m:
                    return dep, arr, ok, trip_plus
                if a < stop_at:
                    t = dep + S[loc[a], loc[a + 1]]
            return dep, None, ok, trip_plus

        if i == j:
            ok = ok[:, None] & (D[np.ix_(rq.pick, rq.drop)] < INF)
            arr_d = dep_p[:, None] + S[np.ix_(rq.pick, rq.drop)]
        else:
            ok &= D[rq.pick, loc[i + 1]] < INF
            t = dep_p + S[rq.pick, loc[i + 1]]
            dep_j, _, ok, trip_plus = through(t, i + 1, j, ok, trip_plus)
            ok = ok[:, None] & (D[loc[j], rq.drop] < INF)[None, :]
            arr_d = dep_j[:, None] + S[loc[j], rq.drop][None, :]
            if np.ndim(trip_plus):
                trip_plus = trip_plus[:, None]
        if j == m:
            last = arr_d
        else:
            ok = ok & (D[rq.drop, loc[j + 1]] < INF)[None, :]
            t = arr_d + S[rq.drop, loc[j + 1]][None, :]
            _, last, ok, trip_plus = through(t, j + 1, m, ok, trip_plus)
        ok = ok & (last <= route.service_end)
        if not ok.any():
            return None
        w = state.model.w
        trip = arr_d + rq.walk_d[None, :] - t_req
        dep_off = dep_p - t_req
        wait_vio = w.w_wait_vio * np.maximum(dep_off - state.cfg.t_wait_max, 0)
        cost = (w.w_detour * (last - old_end) + w.w_trip * (trip + trip_plus)
                + w.w_walk * (rq.walk_p[:, None] + rq.walk_d[None, :]) + wait_vio[:, None]
                + self._trip_vio(w, rq.limit, trip))
        cost = np.where(ok, cost, INF)
        flat = int(np.argmin(cost))
        a, b = divmod(flat, cost.shape[1])
        best = int(cost[a, b])
        if best >= INF:
            return None
        return best, a, b


class _Request:
    __slots__ = ("t_req", "limit", "pick", "walk_p", "drop", "walk_d")

    def __init__(self, t_req, limit, pick, walk_p, drop, walk_d):
        self.t_req = t_req
        self.limit = limit
        self.pick = pick
        self.walk_p = walk_p
        self.drop = drop
        self.walk_d = walk_d
