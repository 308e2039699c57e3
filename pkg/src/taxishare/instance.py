"""Instance records and CSV input/output."""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .config import InstanceConfig, dump_config, load_config
from .graph import PSG, VEH, RoadNetwork

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RequestRecord:
    origin: int
    destination: int
    t_req: int


@dataclass(frozen=True)
class VehicleRecord:
    initial_location: int
    service_start: int
    service_end: int
    capacity: int


@dataclass
class Instance:
    network: RoadNetwork
    vehicles: list
    requests: list
    config: InstanceConfig = field(default_factory=InstanceConfig)

    def equals(self, other):
        return (self.network.equals(other.network)
                and self.vehicles == other.vehicles
                and self.requests == other.requests
                and self.config == other.config)


class InstanceError(ValueError):
    pass


def _rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None:
            return
        if [c.strip() for c in first] != header:
            raise InstanceError(f"{path}:1: expected header {','.join(header)}")
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InstanceError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            yield lineno, row


def _ints(path, lineno, row):
    try:
        return [int(c) for c in row]
    except ValueError:
        raise InstanceError(f"{path}:{lineno}: malformed integer in {row!r}") from None


NETWORK_HEADER = ["tail", "head", "mode", "travel_time_ds"]
VEHICLE_HEADER = ["initial_location", "service_start_ds", "service_end_ds", "capacity"]
REQUEST_HEADER = ["origin", "destination", "t_req_ds"]


def load_network(path):
    edges = {VEH: [], PSG: []}
    n = 0
    for lineno, row in _rows(path, NETWORK_HEADER):
        mode = row[2].strip()
        if mode not in edges:
            raise InstanceError(f"{path}:{lineno}: mode must be veh or psg, got {mode!r}")
        tail, head, time = _ints(path, lineno, [row[0], row[1], row[3]])
        if tail < 0 or head < 0:
            raise InstanceError(f"{path}:{lineno}: negative vertex id")
        if time <= 0:
            raise InstanceError(f"{path}:{lineno}: non-positive travel time")
        edges[mode].append((tail, head, time))
        n = max(n, tail + 1, head + 1)
    return RoadNetwork(n, edges[VEH], edges[PSG])


def load_vehicles(path, net):
    out = []
    for lineno, row in _rows(path, VEHICLE_HEADER):
        loc, start, end, cap = _ints(path, lineno, row)
        if not 0 <= loc < net.n:
            raise InstanceError(f"{path}:{lineno}: vertex id {loc} out of range")
        if not net.veh_eligible[loc]:
            raise InstanceError(f"{path}:{lineno}: vertex {loc} has no vehicle edges")
        if start >= end:
            raise InstanceError(f"{path}:{lineno}: service start must precede service end")
        if cap < 1:
            raise InstanceError(f"{path}:{lineno}: capacity must be positive")
        out.append(VehicleRecord(loc, start, end, cap))
    return out


def load_requests(path, net):
    out = []
    for lineno, row in _rows(path, REQUEST_HEADER):
        o, d, t = _ints(path, lineno, row)
        for v in (o, d):
            if not 0 <= v < net.n:
                raise InstanceError(f"{path}:{lineno}: vertex id {v} out of range")
            if not net.psg_eligible[v]:
                raise InstanceError(f"{path}:{lineno}: vertex {v} has no passenger edges")
        if t < 0:
            raise InstanceError(f"{path}:{lineno}: negative request time")
        out.append(RequestRecord(o, d, t))
    ordered = sorted(out, key=lambda r: r.t_req)
    if ordered != out:
        log.warning("%s: requests not sorted by request time; sorting", path)
    return ordered


def load_instance(network_path, vehicles_path, requests_path, config_path=None, config=None):
    net = load_network(network_path)
    cfg = config or InstanceConfig()
    if config_path is not None:
        cfg = load_config(config_path, cfg)
    return Instance(net, load_vehicles(vehicles_path, net), load_requests(requests_path, net), cfg)


def write_instance(inst, directory):
    """Write ``network.csv``, ``vehicles.csv``, ``requests.csv``, ``config.txt``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "network.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(NETWORK_HEADER)
        for mode in (VEH, PSG):
            for t, h, tt in inst.network.edges(mode):
                w.writerow([t, h, mode, tt])
    with open(d / "vehicles.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(VEHICLE_HEADER)
        for v in inst.vehicles:
            w.writerow([v.initial_location, v.service_start, v.service_end, v.capacity])
    with open(d / "requests.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REQUEST_HEADER)
        for r in inst.requests:
            w.writerow([r.origin, r.destination, r.t_req])
    dump_config(inst.config, d / "config.txt")
    return d
