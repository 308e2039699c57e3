from fractions import Fraction

import pytest

from taxishare.config import InstanceConfig, dump_config, load_config
from taxishare.generate import random_instance
from taxishare.instance import InstanceError, load_instance, load_network, write_instance


def _write(path, text):
    path.write_text(text)
    return path


def _tiny(tmp_path, requests="origin,destination,t_req_ds\n0,2,10\n"):
    net = _write(tmp_path / "net.csv", "tail,head,mode,travel_time_ds\n"
                 "0,1,veh,5\n1,2,veh,5\n0,1,psg,40\n1,2,psg,40\n")
    veh = _write(tmp_path / "veh.csv",
                 "initial_location,service_start_ds,service_end_ds,capacity\n0,0,1000,4\n")
    req = _write(tmp_path / "req.csv", requests)
    return net, veh, req


def test_minimal_instance(tmp_path):
    inst = load_instance(*_tiny(tmp_path))
    assert inst.network.n == 3
    assert len(inst.vehicles) == 1 and inst.requests[0].t_req == 10


def test_shuffled_requests_are_sorted(tmp_path, caplog):
    text = "origin,destination,t_req_ds\n0,2,30\n2,0,10\n1,0,20\n"
    inst = load_instance(*_tiny(tmp_path, text))
    assert [r.t_req for r in inst.requests] == [10, 20, 30]
    assert "sorting" in caplog.text


def test_zero_travel_time_rejected(tmp_path):
    path = _write(tmp_path / "n.csv", "tail,head,mode,travel_time_ds\n0,1,veh,3\n1,0,veh,0\n")
    with pytest.raises(InstanceError, match=r"n\.csv:3: non-positive travel time"):
        load_network(path)


@pytest.mark.parametrize("row, message", [
    ("0,x,veh,3", "malformed integer"),
    ("0,1,bus,3", "mode must be"),
    ("0,1,veh", "expected 4 columns"),
])
def test_malformed_rows_name_file_and_line(tmp_path, row, message):
    path = _write(tmp_path / "n.csv", f"tail,head,mode,travel_time_ds\n0,1,veh,3\n{row}\n")
    with pytest.raises(InstanceError, match=rf"n\.csv:3: {message}"):
        load_network(path)


def test_request_vertex_out_of_range(tmp_path):
    with pytest.raises(InstanceError, match="out of range"):
        load_instance(*_tiny(tmp_path, "origin,destination,t_req_ds\n0,7,1\n"))


def test_round_trip(tmp_path):
    inst = random_instance(4, "geometric", 60, vehicles=3, requests=12)
    d = write_instance(inst, tmp_path / "inst")
    back = load_instance(d / "network.csv", d / "vehicles.csv", d / "requests.csv",
                         d / "config.txt")
    assert back.equals(inst)


def test_config_defaults():
    cfg = InstanceConfig()
    assert (cfg.tau, cfg.omega, cfg.alpha, cfg.beta) == (1, 0, Fraction(17, 10), 1200)
    assert cfg.t_wait_max == 6000 and cfg.capacity == 4


def test_config_file_round_trip_and_aliases(tmp_path):
    cfg = InstanceConfig(rho=300, alpha=Fraction(3, 2), sorted_buckets=False, k_pd=4)
    dump_config(cfg, tmp_path / "c.txt")
    assert load_config(tmp_path / "c.txt") == cfg
    _write(tmp_path / "a.txt", "# comment\nmax-wait = 900\ntau=1/2\n")
    loaded = load_config(tmp_path / "a.txt")
    assert loaded.t_wait_max == 900 and loaded.tau == Fraction(1, 2)


@pytest.mark.parametrize("kw", [dict(alpha=Fraction(1, 2)), dict(rho=-1), dict(k_pd=3),
                                dict(capacity=0), dict(mode="fast")])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        InstanceConfig(**kw)


def test_unknown_config_key(tmp_path):
    _write(tmp_path / "c.txt", "speed=3\n")
    with pytest.raises(ValueError, match="c.txt:1: unknown key"):
        load_config(tmp_path / "c.txt")
