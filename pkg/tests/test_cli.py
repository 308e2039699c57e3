import csv

import pytest

from taxishare.cli import run_cli
from taxishare.generate import random_instance
from taxishare.instance import write_instance


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("inst")
    write_instance(random_instance(21, "grid", 64, vehicles=3, requests=15), d)
    return ["--network", str(d / "network.csv"), "--vehicles", str(d / "vehicles.csv"),
            "--requests", str(d / "requests.csv"), "--config", str(d / "config.txt")]


def _events(out):
    with open(out / "events.csv") as fh:
        return list(csv.DictReader(fh))


def test_oracle_mode_same_costs(files, tmp_path):
    assert run_cli(files + ["--out", str(tmp_path / "k")]) == 0
    assert run_cli(files + ["--out", str(tmp_path / "o"), "--mode", "oracle"]) == 0
    costs = [r["cost"] for r in _events(tmp_path / "k")]
    assert costs == [r["cost"] for r in _events(tmp_path / "o")]
    assert (tmp_path / "k" / "stats.csv").exists()


def test_radius_zero_single_meeting_points(files, tmp_path):
    assert run_cli(files + ["--out", str(tmp_path), "--rho", "0", "--mode", "both"]) == 0
    rows = _events(tmp_path)
    assert rows and all(r["num_pickups"] in ("0", "1") for r in rows)
    assert all(r["num_dropoffs"] in ("0", "1") for r in rows)
    assert any(r["num_pickups"] == "1" for r in rows)


def test_overrides_are_written(files, tmp_path):
    args = ["--out", str(tmp_path), "--alpha", "3/2", "--max-wait", "900",
            "--sorted-buckets", "off", "--k-pd", "4", "--pals", "individual"]
    assert run_cli(files + args) == 0
    text = (tmp_path / "config.txt").read_text()
    for line in ("alpha=3/2", "t_wait_max=900", "sorted_buckets=off", "k_pd=4",
                 "pals=individual"):
        assert line in text.splitlines()


def test_ch_cache_reused(files, tmp_path):
    cache = tmp_path / "ch.bin"
    assert run_cli(files + ["--out", str(tmp_path / "a"), "--ch-cache", str(cache)]) == 0
    assert cache.exists()
    assert run_cli(files + ["--out", str(tmp_path / "b"), "--ch-cache", str(cache)]) == 0
    assert _events(tmp_path / "a")[-1]["cost"] == _events(tmp_path / "b")[-1]["cost"]


def test_missing_network_exits_2(files, capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(files[2:])
    assert exc.value.code == 2
    assert "--network" in capsys.readouterr().err


def test_unknown_flag_exits_2(files):
    with pytest.raises(SystemExit) as exc:
        run_cli(files + ["--turbo"])
    assert exc.value.code == 2


def test_bad_input_reports_error(files, tmp_path, capsys):
    bad = tmp_path / "net.csv"
    bad.write_text("tail,head,mode,travel_time_ds\n0,1,veh,0\n")
    args = list(files)
    args[1] = str(bad)
    assert run_cli(args + ["--out", str(tmp_path)]) == 1
    assert "non-positive travel time" in capsys.readouterr().err
