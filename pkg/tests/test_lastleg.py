import pytest

from taxishare.config import InstanceConfig
from taxishare.cost import CostModel
from taxishare.dispatch import dispatch_request
from taxishare.graph import VEH, all_pairs
from taxishare.kernels import INF
from taxishare.lastleg import (LastStopBuckets, _pals_exact, dals_collective, dals_individual,
                               pals_collective, pals_individual, pareto_dropoffs)
from states import busy_state


@pytest.fixture(scope="module")
def scenario():
    state, remaining = busy_state(seed=9, size=110, vehicles=6, requests=40)
    D = all_pairs(state.net, VEH)
    rid, request = remaining[0]
    state.advance(request.t_req)
    return state, D, dispatch_request(state, rid, request).search


def test_last_stop_buckets_follow_vehicle(scenario):
    state = scenario[0]
    buckets = LastStopBuckets(state.ch)
    buckets.update(0, 5)
    size = buckets.store.size
    assert size == len(state.ch.forward_space(5))
    buckets.update(0, 9)
    assert buckets.store.size == len(state.ch.forward_space(9))
    assert all(e[1] == 0 for v in range(state.ch.n) for e in buckets.store.entries(v))


def test_pals_individual_distances_are_exact(scenario):
    state, D, search = scenario
    env = search._env("pals")
    found, cbar = pals_individual(env, search.pickups, search.dropoffs, search.pd, INF)
    assert found
    for (vid, a), x in found.items():
        assert x == D[state.routes[vid].last.location, search.pickups[a][0]]
    assert cbar < INF


def test_pals_collective_matches_exhaustive(scenario):
    state, D, search = scenario
    env = search._env("pals")
    outcome = pals_collective(env, search.pickups, search.dropoffs, search.pd, INF)
    best = None
    for route in state.routes:
        for a, (p, walk_p) in enumerate(search.pickups):
            x = int(D[route.last.location, p])
            for b, (q, walk_d) in enumerate(search.dropoffs):
                cost, ok = _pals_exact(env, route, walk_p, int(search.pd.dist[a, b]), walk_d, x)
                if ok and cost < INF:
                    key = (cost, route.vid, p, q)
                    best = key if best is None or key < best else best
    got = outcome.best
    assert not outcome.fallback
    assert (got.cost, got.vehicle, search.pickups[got.pickup][0],
            search.dropoffs[got.dropoff][0]) == best


def test_pals_collective_settles_in_bound_order(scenario):
    _, _, search = scenario
    env = search._env("pals")
    order = pals_collective(env, search.pickups, search.dropoffs, search.pd, INF,
                            record_order=True).settled_labels
    assert order == sorted(order)


def test_dals_searches_agree_without_pruning(scenario):
    state, D, search = scenario
    env = search._env("dals")
    env.cfg = env.cfg.with_overrides(cost_pruning=False, dropoff_domination=False)
    a = dals_individual(env, search.dropoffs, INF)
    b = dals_collective(env, search.dropoffs, INF)
    assert a == b
    busy = [r for r in state.routes if r.m > 0]
    assert len(a) == sum(1 for r in busy for q, _ in search.dropoffs
                         if D[r.last.location, q] < INF)
    for (vid, idx), x in a.items():
        assert x == D[state.routes[vid].last.location, search.dropoffs[idx][0]]


def test_pareto_keeps_closer_or_shorter_walk():
    model = CostModel(InstanceConfig().weights())
    dropoffs = [(10, 50), (11, 0), (12, 200)]
    # dropoff 2 is both farther to drive and farther to walk than dropoff 0
    kept = pareto_dropoffs(model, dropoffs, {3: {0: 100, 1: 130, 2: 140}})
    assert set(kept[3]) == {0, 1}
