import pytest

from taxishare.cost import PALS, WALK
from taxishare.dispatch import DispatchState, DistanceTrace, dispatch_request
from taxishare.graph import VEH, RoadNetwork, all_pairs
from taxishare.instance import Instance, RequestRecord, VehicleRecord
from taxishare.oracle import Oracle
from states import busy_state


def _line_instance(service_end=1000, **cfg):
    veh = [(0, 1, 3), (1, 2, 4)]
    psg = [(0, 1, 30), (1, 0, 30), (1, 2, 40), (2, 1, 40)]
    inst = Instance(RoadNetwork(3, veh, psg), [VehicleRecord(0, 0, service_end, 4)],
                    [RequestRecord(0, 2, 0)])
    inst.config = inst.config.with_overrides(**cfg)
    return inst


def test_idle_vehicle_picks_up_at_origin():
    inst = _line_instance()
    state = DispatchState(inst)
    res = dispatch_request(state, 0, inst.requests[0])
    ins = res.insertion
    # scale 10: detour 7 plus trip 7
    assert (ins.kind, ins.vehicle, ins.cost) == (PALS, 0, 140)
    assert Oracle(inst.network).best_insertion(state, inst.requests[0]).cost == 140


def test_walks_when_service_is_over():
    inst = _line_instance(service_end=5)
    state = DispatchState(inst)
    ins = dispatch_request(state, 0, inst.requests[0]).insertion
    assert (ins.kind, ins.cost) == (WALK, 700)
    rider, _ = state.commit(0, inst.requests[0], ins, None)
    assert rider.vehicle == -1 and rider.arrival_time == 70


def test_radius_zero_uses_origin_and_destination():
    state, remaining = busy_state(seed=2, requests=20, config=lambda c: c.with_overrides(rho=0))
    net = state.net
    for rid, request in remaining:
        state.advance(request.t_req)
        res = dispatch_request(state, rid, request)
        assert res.num_pickups == int(net.veh_eligible[request.origin])
        assert res.num_dropoffs == int(net.veh_eligible[request.destination])
        state.commit(rid, request, res.insertion, res.context)


@pytest.mark.parametrize("seed, kind", [(1, "grid"), (4, "geometric")])
def test_reported_distances_are_exact(seed, kind):
    state, remaining = busy_state(seed=seed, kind=kind, size=90, requests=30)
    D = all_pairs(state.net, VEH)
    phases = set()
    for rid, request in remaining:
        state.advance(request.t_req)
        trace = DistanceTrace()
        res = dispatch_request(state, rid, request, trace)
        for phase, s, t, dist in trace.items:
            assert dist == D[s, t], (phase, s, t)
            phases.add(phase)
        state.commit(rid, request, res.insertion, res.context)
    assert {"elliptic", "pd", "laststop"} <= phases


def test_buckets_stay_coherent_and_match_oracle():
    state, remaining = busy_state(seed=6, size=80, requests=30, upto=0)
    oracle = Oracle(state.net)
    for rid, request in remaining:
        state.advance(request.t_req)
        res = dispatch_request(state, rid, request)
        assert res.insertion.cost == oracle.best_insertion(state, request).cost
        state.commit(rid, request, res.insertion, res.context)
        assert state.buckets_coherent()


def test_phase_bounds_never_increase():
    state, remaining = busy_state(seed=8, requests=30)
    for rid, request in remaining:
        state.advance(request.t_req)
        res = dispatch_request(state, rid, request)
        bounds = res.phase_bounds
        assert bounds == sorted(bounds, reverse=True)
        if bounds:
            assert bounds[-1] == res.insertion.cost
        state.commit(rid, request, res.insertion, res.context)
