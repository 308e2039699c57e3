import csv

import pytest

from taxishare.generate import random_instance
from taxishare.sim import (EVENT_COLUMNS, LEG_COLUMNS, STATS_COLUMNS, compute_stats,
                           rider_times, run_simulation, write_outputs)


@pytest.fixture(scope="module")
def result():
    inst = random_instance(12, "grid", 81, vehicles=4, requests=30)
    inst.config = inst.config.with_overrides(mode="both")
    return run_simulation(inst, check_every=3)


def test_no_oracle_mismatch(result):
    assert result.mismatches == []
    assert all(row["cost"] == row["cost_oracle"] for row in result.events)


def test_fleet_drained(result):
    state = result.state
    assert all(route.m == 0 for route in state.routes)
    for rider in state.riders.values():
        if rider.vehicle >= 0:
            assert rider.board_time is not None and rider.arrival_time is not None


def test_rider_times_respect_physics(result):
    for rider in result.state.riders.values():
        wait, trip, walk = rider_times(rider)
        assert wait >= rider.walk_p or rider.vehicle < 0
        assert trip >= walk


def test_legs_are_contiguous(result):
    by_vehicle = {}
    for vid, frm, to, arr_from, dep, arr_to, occ in result.legs:
        assert arr_from <= dep <= arr_to and 0 <= occ <= 4
        prev = by_vehicle.get(vid)
        if prev is not None:
            # idle time between legs is not operating time
            assert prev[1] == frm and prev[5] <= arr_from
        by_vehicle[vid] = (vid, to, None, None, None, arr_to)


def test_stats_from_legs(result):
    riders = [result.state.riders[r] for r in sorted(result.state.riders)]
    assert compute_stats(riders, result.legs) == result.stats
    assert 0 < result.stats.avg_occupancy <= 4


def test_outputs(tmp_path, result):
    out = write_outputs(result, tmp_path / "o")
    with open(out / "events.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == EVENT_COLUMNS and len(rows) == 30
    with open(out / "stats.csv") as fh:
        assert next(csv.reader(fh)) == STATS_COLUMNS
    with open(out / "legs.csv") as fh:
        assert next(csv.reader(fh)) == LEG_COLUMNS


def test_oracle_mode_reproduces_dispatcher_costs(result):
    inst = random_instance(12, "grid", 81, vehicles=4, requests=30)
    inst.config = inst.config.with_overrides(mode="oracle")
    oracle_run = run_simulation(inst)
    assert [r["cost"] for r in oracle_run.events] == [r["cost"] for r in result.events]
