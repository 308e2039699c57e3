"""Searches for distances from vehicles' last stops.

Pickups after the last stop (PALS) and dropoffs after the last stop (DALS)
both need ``dist(last(v), x)`` for meeting points ``x``.  Every vehicle keeps
entries in the forward CH space of its last stop, ordered by distance, and
reverse searches from the points scan them.  Individual searches run in
batches of ``k`` points; collective searches propagate one label per
pickup/dropoff pair (or per dropoff) and prune by cost and domination.
"""
import heapq
from dataclasses import dataclass, field

from .buckets import BucketStore
from .ch import SearchCounters, batched_upward_search
from .kernels import INF


class LastStopBuckets:
    def __init__(self, ch, sorted_buckets=True):
        self.ch = ch
        self.store = BucketStore(ch.n, sorted_buckets)
        self.vertex = {}

    def update(self, vid, new_last):
        old = self.vertex.get(vid)
        if old == new_last:
            return
        if old is not None:
            for v, _ in self.ch.forward_space(old):
                self.store.remove_entries(v, vid)
        for v, d in self.ch.forward_space(new_last):
            self.store.insert_entry(v, vid, d)
        self.vertex[vid] = new_last


@dataclass
class SearchEnv:
    """Everything a last-stop search reads: hierarchy, buckets, fleet and cost model."""
    ch: object
    buckets: LastStopBuckets
    routes: list
    model: object
    ctx: object
    cfg: object
    counters: SearchCounters = field(default_factory=SearchCounters)


@dataclass
class PalsCandidate:
    vehicle: int
    pickup: int   # index into the pickup list
    dropoff: int  # index into the dropoff list
    dist: int
    cost: int
    feasible: bool


def _pals_exact(env, route, walk_p, pd, walk_d, x):
    """Exact PALS cost and whether it ends within the vehicle's service."""
    t_dep = route.last.t_dep
    cost = env.model.cost_from_last_stop(env.ctx, walk_p, pd, walk_d, t_dep, x)
    if cost >= INF:
        return INF, False
    dep = max(t_dep + x, env.ctx.t_req + walk_p)
    return cost, dep + pd <= route.service_end


def pals_individual(env, pickups, dropoffs, pd_table, c_upper):
    """Batched searches from pickups; returns ``({(vid, p): dist}, c_upper)``.

    Scans stop on a bound that only knows the smallest PD distance of the
    request.  The bound ``c_upper`` tightens whenever a vehicle could take
    the rider from a pickup straight to the destination within its service
    time.  Every distance the best PALS insertion needs is exact on return.
    """
    model, ctx, cfg, routes = env.model, env.ctx, env.cfg, env.routes
    pd = pd_table.dist
    pd_min = pd_table.row_min()
    delta_pd_min = pd_table.delta_pd_min
    # the destination is a dropoff (with no walk) when a vehicle can reach it
    to_dest = next((b for b, (q, walk) in enumerate(dropoffs) if q == ctx.destination), None)
    lanes_all = [a for a in range(len(pickups)) if pd_min[a] < INF]
    cbar = [c_upper]
    found = {}

    def lb(a, x):
        return model.lb_pals(ctx, pickups[a][1], delta_pd_min, 0, x)

    for start in range(0, len(lanes_all), cfg.k_laststop):
        batch = lanes_all[start:start + cfg.k_laststop]

        def visit(u, labels, lanes, batch=batch):
            def stop(entry):
                d_up = entry[2]
                return min(lb(batch[l], d_up + labels[l]) for l in lanes) > cbar[0]

            def record(entry):
                vid, d_up = entry[1], entry[2]
                for l in lanes:
                    a = batch[l]
                    tent = d_up + labels[l]
                    key = (vid, a)
                    if tent < found.get(key, INF):
                        found[key] = tent
                    if to_dest is not None:
                        cost, ok = _pals_exact(env, routes[vid], pickups[a][1],
                                               int(pd[a, to_dest]), 0, tent)
                        if ok and cost < cbar[0]:
                            cbar[0] = cost

            env.counters.scanned += env.buckets.store.scan(
                u, record, stop if cfg.laststop_stop_rule else None)

        def prune(l, d, batch=batch):
            return lb(batch[l], d) > cbar[0]

        batched_upward_search(env.ch.down, [(pickups[a][0], 0) for a in batch], visit,
                              prune_lane=prune if cfg.cost_pruning else None,
                              counters=env.counters)
    if cfg.cost_pruning:
        found = {key: x for key, x in found.items() if lb(key[1], x) <= cbar[0]}
    return found, cbar[0]


@dataclass
class PalsOutcome:
    best: PalsCandidate
    fallback: bool
    c_upper: int
    initial_labels: int = 0
    initial_pruned: int = 0
    settled_labels: list = field(default_factory=list)


class _Label:
    __slots__ = ("pickup", "dropoff", "dist", "c_min", "alive", "closed")

    def __init__(self, pickup, dropoff, dist, c_min):
        self.pickup = pickup
        self.dropoff = dropoff
        self.dist = dist
        self.c_min = c_min
        self.alive = True
        self.closed = False


def _keep_shortest(labels, label):
    """Without domination a vertex still keeps one label per pickup/dropoff pair:
    the shortest.  Returns False if ``label`` loses to an existing one."""
    for other in labels:
        if other.alive and other.pickup == label.pickup and other.dropoff == label.dropoff:
            if other.dist <= label.dist:
                return False
            if not other.closed:
                other.alive = False
    labels[:] = [o for o in labels if o.alive]
    return True


def pals_collective(env, pickups, dropoffs, pd_table, c_upper, record_order=False):
    """One label-setting search over all pickup/dropoff pairs.

    Labels are settled in order of their cost lower bound.  The result is
    the cheapest last-stop insertion seen; if that one overruns its
    vehicle's service end the caller must redo the work individually,
    since domination may have discarded a feasible alternative.
    """
    model, ctx, cfg, routes = env.model, env.ctx, env.cfg, env.routes
    pd = pd_table.dist.tolist()
    cbar = c_upper
    cost_pruning = cfg.cost_pruning
    use_domination = cfg.pd_domination
    at_vertex = {}
    heap = []
    seq = 0
    created = pruned = 0
    candidates = {}

    def dominates(l1, l2):
        return model.pd_label_dominates(
            pickups[l1.pickup][1], pd[l1.pickup][l1.dropoff], dropoffs[l1.dropoff][1], l1.dist,
            pickups[l2.pickup][1], pd[l2.pickup][l2.dropoff], dropoffs[l2.dropoff][1], l2.dist)

    def add(v, label):
        nonlocal seq
        labels = at_vertex.setdefault(v, [])
        if use_domination:
            for other in labels:
                if other.alive and dominates(other, label):
                    return False
            for other in labels:
                if other.alive and not other.closed and dominates(label, other):
                    other.alive = False
            labels[:] = [o for o in labels if o.alive]
        elif not _keep_shortest(labels, label):
            return False
        labels.append(label)
        heapq.heappush(heap, (label.c_min, label.dist, label.pickup, label.dropoff, seq, v, label))
        seq += 1
        return True

    curves = {}

    def curve(a, b):
        f = curves.get((a, b))
        if f is None:
            f = curves[a, b] = model.lb_pals_curve(ctx, pickups[a][1], pd[a][b], dropoffs[b][1])
        return f

    def c_min(a, b, dist):
        return curve(a, b)(dist)

    for a, (p, walk_p) in enumerate(pickups):
        initial = []
        for b in range(len(dropoffs)):
            if pd[a][b] >= INF:
                continue
            created += 1
            c = c_min(a, b, 0)
            if cost_pruning and c > cbar:
                pruned += 1
                continue
            initial.append(_Label(a, b, 0, c))
        # cheap labels first so dominated ones die on arrival
        initial.sort(key=lambda lab: (lab.c_min, lab.pickup, lab.dropoff))
        for label in initial:
            if not add(p, label):
                pruned += 1

    settled_order = []
    store = env.buckets.store
    sorted_store = store.sorted
    stop_rule = cfg.laststop_stop_rule
    counters = env.counters
    while heap:
        c, dist, a, b, _, v, label = heapq.heappop(heap)
        if not label.alive:
            continue
        if cost_pruning and c > cbar:
            break
        label.closed = True
        counters.settled += 1
        if record_order:
            settled_order.append(c)
        lb = curve(a, b)
        bucket = store.bucket(v)
        if bucket:
            walk_p, walk_d, pd_ab = pickups[a][1], dropoffs[b][1], pd[a][b]
            # inlined BucketStore.scan: this loop dominates the collective search
            for entry in bucket:
                counters.scanned += 1
                x = dist + entry[2]
                if stop_rule and lb(x) > cbar:
                    if sorted_store:
                        break
                    continue
                key = (entry[1], a, b)
                if x >= candidates.get(key, INF):
                    continue
                candidates[key] = x
                cost, ok = _pals_exact(env, routes[entry[1]], walk_p, pd_ab, walk_d, x)
                if ok and cost < cbar:
                    cbar = cost
        for w, length in env.ch.down[v]:
            counters.relaxed += 1
            nd = dist + length
            nc = lb(nd)
            if cost_pruning and nc > cbar:
                continue
            add(w, _Label(a, b, nd, nc))

    best = None
    best_key = None
    for (vid, a, b), x in candidates.items():
        cost, ok = _pals_exact(env, routes[vid], pickups[a][1], pd[a][b], dropoffs[b][1], x)
        if cost > cbar:
            continue
        key = (cost, vid, pickups[a][0], dropoffs[b][0])
        if best_key is None or key < best_key:
            best_key = key
            best = PalsCandidate(vid, a, b, x, cost, ok)
    fallback = best is not None and not best.feasible
    return PalsOutcome(best, fallback, cbar, created, pruned, settled_order)


def dals_individual(env, dropoffs, c_upper):
    """Batched searches from dropoffs with a fixed bound; returns ``{(vid, d): dist}``."""
    model, ctx, cfg, routes = env.model, env.ctx, env.cfg, env.routes
    found = {}

    def lb(b, x):
        return model.lb_dals(ctx, dropoffs[b][1], x)

    indices = list(range(len(dropoffs)))
    for start in range(0, len(indices), cfg.k_laststop):
        batch = indices[start:start + cfg.k_laststop]

        def visit(u, labels, lanes, batch=batch):
            def stop(entry):
                d_up = entry[2]
                return min(lb(batch[l], d_up + labels[l]) for l in lanes) > c_upper

            def record(entry):
                vid, d_up = entry[1], entry[2]
                if routes[vid].m == 0:
                    return
                for l in lanes:
                    key = (vid, batch[l])
                    tent = d_up + labels[l]
                    if tent < found.get(key, INF):
                        found[key] = tent

            env.counters.scanned += env.buckets.store.scan(
                u, record, stop if cfg.laststop_stop_rule else None)

        def prune(l, d, batch=batch):
            return lb(batch[l], d) > c_upper

        batched_upward_search(env.ch.down, [(dropoffs[b][0], 0) for b in batch], visit,
                              prune_lane=prune if cfg.cost_pruning else None,
                              counters=env.counters)
    if cfg.cost_pruning:
        found = {key: x for key, x in found.items() if lb(key[1], x) <= c_upper}
    return found


def dals_collective(env, dropoffs, c_upper):
    """Label-setting search over dropoff labels with domination; same result shape."""
    model, ctx, cfg, routes = env.model, env.ctx, env.cfg, env.routes
    use_domination = cfg.dropoff_domination
    at_vertex = {}
    heap = []
    found = {}
    seq = 0

    def add(v, b, dist):
        nonlocal seq
        c = model.lb_dals(ctx, dropoffs[b][1], dist)
        if cfg.cost_pruning and c > c_upper:
            return
        label = _Label(-1, b, dist, c)
        labels = at_vertex.setdefault(v, [])
        if use_domination:
            wd = dropoffs[b][1]
            for o in labels:
                if o.alive and model.dropoff_label_dominates(dropoffs[o.dropoff][1], o.dist, wd, dist):
                    return
            for o in labels:
                if o.alive and not o.closed and model.dropoff_label_dominates(
                        wd, dist, dropoffs[o.dropoff][1], o.dist):
                    o.alive = False
            labels[:] = [o for o in labels if o.alive]
        elif not _keep_shortest(labels, label):
            return
        labels.append(label)
        heapq.heappush(heap, (c, dist, b, seq, v, label))
        seq += 1

    for b, (d, _) in enumerate(dropoffs):
        add(d, b, 0)
    store = env.buckets.store
    counters = env.counters
    while heap:
        c, dist, b, _, v, label = heapq.heappop(heap)
        if not label.alive:
            continue
        if cfg.cost_pruning and c > c_upper:
            break
        label.closed = True
        counters.settled += 1
        walk_d = dropoffs[b][1]

        def stop(entry):
            return model.lb_dals(ctx, walk_d, dist + entry[2]) > c_upper

        def visit(entry):
            vid = entry[1]
            if routes[vid].m == 0:
                return
            key = (vid, b)
            x = dist + entry[2]
            if x < found.get(key, INF):
                found[key] = x

        counters.scanned += store.scan(v, visit, stop if cfg.laststop_stop_rule else None)
        for w, length in env.ch.down[v]:
            counters.relaxed += 1
            add(w, b, dist + length)
    if cfg.cost_pruning:
        found = {key: x for key, x in found.items()
                 if model.lb_dals(ctx, dropoffs[key[1]][1], x) <= c_upper}
    return found


def pareto_dropoffs(model, dropoffs, per_vehicle):
    """Drop every dropoff beaten by another one for all pickups and penalty states."""
    kept = {}
    for vid, entries in per_vehicle.items():
        items = sorted(entries.items(), key=lambda kv: (kv[1] + dropoffs[kv[0]][1], kv[0]))
        survivors = []
        for b, x in items:
            wd = dropoffs[b][1]
            if any(model.dropoff_label_dominates(dropoffs[o][1], ox, wd, x) for o, ox in survivors):
                continue
            survivors = [(o, ox) for o, ox in survivors
                         if not model.dropoff_label_dominates(wd, x, dropoffs[o][1], ox)]
            survivors.append((b, x))
        kept[vid] = dict(survivors)
    return kept


def group_by_vehicle(found):
    out = {}
    for (vid, b), x in found.items():
        out.setdefault(vid, {})[b] = x
    return out
