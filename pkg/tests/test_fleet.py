import numpy as np
import pytest

from taxishare.config import InstanceConfig
from taxishare.cost import OK, CostModel, Insertion, PALS
from taxishare.fleet import Rider, RouteError, Stop, VehicleRoute, rebuild_schedule
from taxishare.graph import RoadNetwork
from taxishare.kernels import INF

from schedule_cases import FAR, new_rider, random_insertion, random_route, rebuilt_times


def _ctx(model, t_req):
    return model.context(0, 0, 0, t_req, INF)


def test_empty_route_has_no_leeways():
    route = VehicleRoute(0, 5, 0, 100, 4)
    assert route.leeway == []


def test_leeway_single_rider():
    # s_1 picks a rider up with 100 slack, s_2 drops them off with 300 slack
    route = VehicleRoute(0, 0, 0, FAR, 4)
    route.stops += [Stop(1, 10, 10, 1), Stop(2, 30, 30, 0)]
    route.stops[1].pickup_deadline = 110
    route.stops[2].dropoff_deadline = 330
    route.recompute_deadlines_and_leeways()
    assert route.leeway == [100, 300]


def test_wait_buffer_raises_leeway():
    route = VehicleRoute(0, 0, 0, FAR, 4)
    route.stops += [Stop(1, 10, 10, 1), Stop(2, 30, 30, 0)]
    route.stops[2].dropoff_deadline = 130
    route.recompute_deadlines_and_leeways()
    base = route.leeway[0]
    route.stops[1].t_dep += 50
    route.stops[2].t_arr += 50
    route.stops[2].t_dep += 50
    route.stops[2].dropoff_deadline += 50
    route.recompute_deadlines_and_leeways()
    assert route.leeway[0] == base + 50


def test_residual_detour_absorbed_by_wait():
    # detour 80 on the first leg, vehicle waits 50 at s_1: delays 80 then 30
    route = VehicleRoute(0, 0, 0, FAR, 4)
    route.stops += [Stop(1, 10, 60, 0, ready=60), Stop(2, 100, 100, 0)]
    route.recompute_deadlines_and_leeways()
    ins = Insertion("pbns", 0, 0, 1, 50, 0, 51, 0, d_ip=5, d_p_next=85, d_jd=0, d_d_next=40,
                    t_start=0)
    before = [(s.t_arr, s.t_dep) for s in route.stops]
    rider = new_rider(ins, 0)
    route.apply_insertion(ins, rider, {rider.rid: rider}, FAR)
    assert route.stops[2].t_arr - before[1][0] == 80
    assert route.stops[4].t_arr - before[2][0] == 30


def test_idle_pals_schedule():
    route = VehicleRoute(0, 3, 0, FAR, 4)
    route.refresh_idle(100)
    rider = Rider(0, 90, 3, 9, 3, 9, 25, 0, 0, wait_deadline=FAR)
    ins = Insertion(PALS, 0, 0, 0, 3, 25, 9, 0, d_ip=0, pd=40, t_start=100)
    route.apply_insertion(ins, rider, {0: rider}, FAR)
    # walk ends at 115, so the vehicle leaves then
    assert [(s.location, s.t_arr, s.t_dep) for s in route.stops] == [(3, 100, 115), (9, 155, 155)]


def test_current_location_rounds_forward(line_net):
    route = VehicleRoute(0, 0, 0, FAR, 4)
    route.stops.append(Stop(2, 7, 7))
    route.recompute_deadlines_and_leeways()
    assert route.current_location(3, line_net) == (1, 3)
    assert route.current_location(5, line_net) == (2, 7)
    idle = VehicleRoute(1, 1, 0, FAR, 4)
    assert idle.current_location(42, line_net) == (1, 42)


def test_advance_pops_completed_stops():
    route = VehicleRoute(0, 0, 0, FAR, 4)
    riders = {0: Rider(0, 0, 0, 0, 1, 2, 0, 0, 0)}
    route.stops += [Stop(1, 10, 10, 1, pickups=[0]), Stop(2, 30, 30, 0, dropoffs=[0])]
    route.recompute_deadlines_and_leeways(riders)
    assert route.advance_to(5, riders) == []
    events = route.advance_to(100, riders)
    assert [e.time for e in events if e.kind == "arrive"] == [10, 30]
    assert route.m == 0 and route.stops[0].location == 2
    assert riders[0].board_time == 10 and riders[0].arrival_time == 30
    assert route.stops[0].t_dep == 100


def test_negative_slack_raises():
    route = VehicleRoute(0, 0, 0, FAR, 4)
    route.stops.append(Stop(1, 50, 50))
    route.stops[1].dropoff_deadline = 40
    with pytest.raises(RouteError):
        route.recompute_deadlines_and_leeways()


def test_residual_recurrence_matches_rebuild():
    rng = np.random.default_rng(3)
    model = CostModel(InstanceConfig().weights())
    for _ in range(2000):
        route, riders = random_route(rng)
        ins, t_req = random_insertion(rng, route)
        anchor, arr, dep = rebuilt_times(route, ins, t_req)
        status, bd = model.evaluate(route, ins, _ctx(model, t_req), detail=True)
        assert status == OK
        old = route.copy()
        rider = new_rider(ins, t_req)
        riders[rider.rid] = rider
        route.apply_insertion(ins, rider, riders, FAR)
        got = route.stops[ins.i + 1:]
        assert [s.t_arr for s in got] == arr
        assert [s.t_dep for s in got] == dep
        assert route.stops[ins.i].t_dep == anchor
        assert bd.t_detour == route.last.t_arr - old.last.t_dep
        plus = 0
        for s_old in old.stops[ins.i + 1:]:
            s_new = next(s for s in route.stops if s.location == s_old.location)
            plus += s_old.num_dropoffs * (s_new.t_arr - s_old.t_arr)
        assert bd.t_trip_plus == plus


def _delayed_ok(route, leg, delta):
    stops = route.stops
    legs = [route.leg_length(a) for a in range(route.m)]
    legs[leg] += delta
    arr, _ = rebuild_schedule(stops[0].t_dep, legs, [s.ready for s in stops[1:]])
    return all(a <= s.t_arr_max for a, s in zip(arr, stops[1:]))


def test_leeway_bisection():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 300:
        route, _ = random_route(rng, deadlines=True)
        for leg, lam in enumerate(route.leeway):
            if lam >= FAR // 2:
                continue
            assert _delayed_ok(route, leg, lam)
            assert not _delayed_ok(route, leg, lam + 1)
            checked += 1


def test_merged_pickup_respects_boarding_deadline():
    model = CostModel(InstanceConfig().weights())
    route = VehicleRoute(0, 0, 0, FAR, 4)
    riders = {0: Rider(0, 0, 0, 0, 5, 6, 0, 0, 0, wait_deadline=20)}
    route.stops += [Stop(5, 10, 10, 1, pickups=[0]), Stop(6, 30, 30, 0, dropoffs=[0])]
    route.recompute_deadlines_and_leeways(riders)
    # a rider who is ready only at 25 would hold the vehicle past the deadline
    ins = Insertion("paired", 0, 1, 1, 5, 25, 6, 0, d_ip=0, pd=20, d_d_next=0, t_start=10)
    status, _ = model.evaluate(route, ins, _ctx(model, 0))
    assert status != OK


def test_network_route_uses_path():
    net = RoadNetwork(3, [(0, 1, 3), (1, 2, 4)], [])
    route = VehicleRoute(0, 0, 0, FAR, 4)
    route.stops.append(Stop(2, 8, 8))
    route.recompute_deadlines_and_leeways()
    with pytest.raises(RouteError):
        route.current_location(4, net)
