import numpy as np
import pytest

from taxishare.ch import build_ch
from taxishare.generate import random_instance
from taxishare.graph import VEH, all_pairs, find_meeting_points
from taxishare.kernels import INF
from taxishare.pdcalc import PdCalculator, pd_max_bound


@pytest.fixture(scope="module")
def setup():
    inst = random_instance(11, "geometric", 150, requests=5)
    net = inst.network
    return net, build_ch(net), all_pairs(net, VEH)


def _points(net, o, d, rho=400):
    return find_meeting_points(net, o, rho, "pickup"), find_meeting_points(net, d, rho, "dropoff")


@pytest.mark.parametrize("k", [1, 2, 8, 16])
@pytest.mark.parametrize("sorted_buckets", [True, False])
def test_table_matches_all_pairs(setup, k, sorted_buckets):
    net, ch, D = setup
    calc = PdCalculator(ch, sorted_buckets)
    for o, d in [(3, 90), (17, 140), (60, 61)]:
        pickups, dropoffs = _points(net, o, d)
        bound = pd_max_bound(net, ch, o, d, pickups, dropoffs)
        table = calc.distances(pickups, dropoffs, bound, k)
        truth = D[np.ix_([p for p, _ in pickups], [q for q, _ in dropoffs])]
        assert np.array_equal(table.dist, np.where(truth <= bound, truth, INF))


def test_bound_covers_every_pair(setup):
    net, ch, D = setup
    pickups, dropoffs = _points(net, 5, 120)
    bound = pd_max_bound(net, ch, 5, 120, pickups, dropoffs)
    assert bound < INF
    assert all(D[p, q] <= bound for p, _ in pickups for q, _ in dropoffs)


def test_unbounded_falls_back_to_pair_queries(setup):
    net, ch, D = setup
    pickups, dropoffs = _points(net, 8, 30)
    table = PdCalculator(ch).distances(pickups, dropoffs, INF)
    assert table.delta_pd_min == min(D[p, q] for p, _ in pickups for q, _ in dropoffs)


def test_empty_sides(setup):
    _, ch, _ = setup
    table = PdCalculator(ch).distances([], [(1, 0)], 100)
    assert table.dist.shape == (0, 1) and table.delta_pd_min == INF
