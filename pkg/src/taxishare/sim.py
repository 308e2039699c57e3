"""Event-driven simulation: requests in time order, vehicles advanced between them."""
import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .cost import TYPE_LABEL
from .dispatch import PHASES, DispatchState, dispatch_request

log = logging.getLogger(__name__)

EVENT_COLUMNS = [
    "request", "t_req", "origin", "destination", "type", "cost", "cost_oracle", "vehicle",
    "pickup", "dropoff", "walk_pickup", "walk_dropoff", "num_pickups", "num_dropoffs",
    "scanned", "relaxed", *[f"scanned_{ph}" for ph in PHASES], "pals_fallback",
    "dals_fallback", "wait_ds", "trip_ds", "walk_ds", "dispatch_us",
]
STATS_COLUMNS = ["requests", "walk_only", "avg_wait_ds", "avg_trip_ds", "avg_walk_ds",
                 "avg_occupancy", "total_op_time_ds", "total_drive_ds"]
LEG_COLUMNS = ["vehicle", "from", "to", "arrival_from", "departure", "arrival_to", "occupancy"]


@dataclass
class SimStats:
    requests: int = 0
    walk_only: int = 0
    avg_wait: float = 0.0
    avg_trip: float = 0.0
    avg_walk: float = 0.0
    avg_occupancy: float = 0.0
    total_op_time: int = 0
    total_drive: int = 0

    def row(self):
        return [self.requests, self.walk_only, f"{self.avg_wait:.4f}", f"{self.avg_trip:.4f}",
                f"{self.avg_walk:.4f}", f"{self.avg_occupancy:.4f}", self.total_op_time,
                self.total_drive]


@dataclass
class SimResult:
    stats: SimStats
    events: list = field(default_factory=list)
    legs: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    state: DispatchState = None


def rider_times(rider):
    """Realized wait, trip and walk of a served rider (deciseconds)."""
    if rider.vehicle < 0:
        return 0, rider.walk_p, rider.walk_p
    wait = rider.board_time - rider.t_req
    trip = rider.arrival_time + rider.walk_d - rider.t_req
    return wait, trip, rider.walk_p + rider.walk_d


def compute_stats(riders, legs):
    stats = SimStats(requests=len(riders))
    stats.walk_only = sum(1 for r in riders if r.vehicle < 0)
    if riders:
        times = [rider_times(r) for r in riders]
        stats.avg_wait = sum(t[0] for t in times) / len(times)
        stats.avg_trip = sum(t[1] for t in times) / len(times)
        stats.avg_walk = sum(t[2] for t in times) / len(times)
    occupied = 0
    for _, _, _, arr_from, dep, arr_to, occ in legs:
        stats.total_op_time += arr_to - arr_from
        stats.total_drive += arr_to - dep
        occupied += occ * (arr_to - dep)
    stats.avg_occupancy = occupied / stats.total_drive if stats.total_drive else 0.0
    return stats


def run_simulation(instance, ch=None, oracle=None, check_every=0, progress=None):
    """Dispatch every request in order, commit the choice and drain the fleet.

    In ``both`` mode the oracle answers each request too and any cost
    difference is recorded in ``SimResult.mismatches``.  ``check_every``
    regenerates all buckets every that many requests and raises if they
    differ from the incrementally maintained ones.
    """
    cfg = instance.config
    state = DispatchState(instance, ch)
    if cfg.mode in ("oracle", "both") and oracle is None:
        from .oracle import Oracle
        oracle = Oracle(instance.network)
    result = SimResult(SimStats(), state=state)
    for rid, request in enumerate(instance.requests):
        state.advance(request.t_req)
        started = time.perf_counter()
        oracle_cost = ""
        if cfg.mode == "oracle":
            ins = _oracle_choice(state, oracle, request)
            res = None
            oracle_cost = ins.cost
        else:
            res = dispatch_request(state, rid, request)
            ins = res.insertion
            if cfg.mode == "both":
                other = _oracle_choice(state, oracle, request)
                oracle_cost = other.cost
                if other.cost != ins.cost:
                    result.mismatches.append((rid, ins.cost, other.cost))
                    log.error("request %d: dispatcher cost %s, oracle cost %s", rid, ins.cost,
                              other.cost)
        elapsed = int((time.perf_counter() - started) * 1e6)
        ctx = state.model.context(rid, request.origin, request.destination, request.t_req,
                                  state.ch.distance(request.origin, request.destination))
        state.commit(rid, request, ins, ctx)
        if check_every and (rid + 1) % check_every == 0 and not state.buckets_coherent():
            raise RuntimeError(f"bucket state diverged after request {rid}")
        result.events.append(_event_row(rid, request, ins, res, oracle_cost, elapsed))
        if progress is not None:
            progress(rid)
    horizon = max((r.last.t_arr for r in state.routes), default=0)
    state.advance(max(horizon, state.now))
    for route in state.routes:
        result.legs += [(route.vid, *leg) for leg in route.legs]
    riders = [state.riders[rid] for rid in range(len(instance.requests))]
    for row, rider in zip(result.events, riders):
        wait, trip, walk = rider_times(rider)
        row.update(wait_ds=wait, trip_ds=trip, walk_ds=walk)
    result.stats = compute_stats(riders, result.legs)
    return result


def _oracle_choice(state, oracle, request):
    return oracle.best_insertion(state, request)


def _event_row(rid, request, ins, res, oracle_cost, elapsed):
    row = {
        "request": rid, "t_req": request.t_req, "origin": request.origin,
        "destination": request.destination, "type": TYPE_LABEL[ins.kind],
        "cost": ins.cost, "cost_oracle": oracle_cost, "vehicle": ins.vehicle,
        "pickup": ins.pickup, "dropoff": ins.dropoff, "walk_pickup": ins.walk_p,
        "walk_dropoff": ins.walk_d, "dispatch_us": elapsed,
    }
    if res is not None:
        row.update(num_pickups=res.num_pickups, num_dropoffs=res.num_dropoffs,
                   scanned=sum(c[0] for c in res.counters.values()),
                   relaxed=sum(c[1] for c in res.counters.values()),
                   pals_fallback=int(res.pals_fallback), dals_fallback=int(res.dals_fallback))
        for ph, (scanned, _) in res.counters.items():
            row[f"scanned_{ph}"] = scanned
    return row


def write_outputs(result, directory):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "events.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, EVENT_COLUMNS, restval="")
        writer.writeheader()
        writer.writerows(result.events)
    with open(out / "stats.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_COLUMNS)
        writer.writerow(result.stats.row())
    with open(out / "legs.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LEG_COLUMNS)
        writer.writerows(result.legs)
    return out
