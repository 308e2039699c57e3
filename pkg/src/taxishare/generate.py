"""Synthetic desk-scale instances: grid and random-geometric road networks."""
from fractions import Fraction

import numpy as np

from .config import InstanceConfig
from .graph import RoadNetwork
from .instance import Instance, RequestRecord, VehicleRecord

# metres per decisecond: 30 km/h driving
VEHICLE_SPEED = Fraction(5, 6)


def _travel_time(length_m, speed):
    return max(1, int(round(Fraction(length_m) / speed)))


def _build(n, pairs, lengths, rng, walking_speed, one_way_prob, walk_only_frac):
    """Turn undirected street segments into vehicle and passenger edges."""
    walk_only = set(rng.choice(n, size=int(walk_only_frac * n), replace=False).tolist()) if walk_only_frac else set()
    veh, psg = [], []
    for (a, b), length in zip(pairs, lengths):
        tv = _travel_time(length, VEHICLE_SPEED)
        tp = _travel_time(length, walking_speed)
        psg += [(a, b, tp), (b, a, tp)]
        if a in walk_only or b in walk_only:
            continue
        if rng.random() < one_way_prob:
            veh.append((a, b, tv) if rng.random() < 0.5 else (b, a, tv))
        else:
            veh += [(a, b, tv), (b, a, tv)]
    return RoadNetwork(n, veh, psg)


def grid_network(rows, cols, rng, walking_speed=Fraction(1, 8), block=(80, 200),
                 one_way_prob=0.1, walk_only_frac=0.0):
    pairs, lengths = [], []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                pairs.append((v, v + 1))
            if r + 1 < rows:
                pairs.append((v, v + cols))
    lengths = rng.integers(block[0], block[1] + 1, size=len(pairs))
    return _build(rows * cols, pairs, lengths.tolist(), rng, walking_speed, one_way_prob, walk_only_frac)


def geometric_network(n, rng, walking_speed=Fraction(1, 8), side_m=2500, neighbors=3,
                      one_way_prob=0.1, walk_only_frac=0.0):
    """Each point is joined to its nearest neighbours; a chain keeps it connected."""
    pts = rng.random((n, 2)) * side_m
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(-1))
    np.fill_diagonal(dist, np.inf)
    seg = set()
    for v in range(n):
        for u in np.argsort(dist[v])[:neighbors].tolist():
            seg.add((min(u, v), max(u, v)))
    order = np.argsort(pts[:, 0] + pts[:, 1]).tolist()
    for a, b in zip(order, order[1:]):
        seg.add((min(a, b), max(a, b)))
    pairs = sorted(seg)
    lengths = [max(10, int(dist[a, b])) for a, b in pairs]
    return _build(n, pairs, lengths, rng, walking_speed, one_way_prob, walk_only_frac)


def median_walk_edge(net):
    w = net.psg_out.weights
    return int(np.median(w)) if len(w) else 0


def random_fleet(net, count, rng, capacity=4, start=0, end=10 ** 6):
    cands = np.nonzero(net.veh_eligible)[0]
    locs = rng.choice(cands, size=count)
    return [VehicleRecord(int(v), start, end, capacity) for v in locs]


def random_requests(net, count, rng, horizon=6000):
    cands = np.nonzero(net.psg_eligible)[0]
    times = np.sort(rng.integers(0, horizon, size=count))
    out = []
    for t in times.tolist():
        o, d = rng.choice(cands, size=2, replace=False).tolist()
        out.append(RequestRecord(int(o), int(d), int(t)))
    return out


def random_instance(seed, kind="grid", size=100, vehicles=5, requests=30, use_radius=True,
                    config=None, horizon=6000, capacity=4, service_end=10 ** 6):
    """One randomized instance; ``size`` is the vertex count (rounded for grids)."""
    rng = np.random.default_rng(seed)
    cfg = config or InstanceConfig()
    if kind == "grid":
        rows = max(2, int(round(size ** 0.5)))
        net = grid_network(rows, max(2, size // rows), rng, cfg.walking_speed, walk_only_frac=0.03)
    elif kind == "geometric":
        net = geometric_network(size, rng, cfg.walking_speed, walk_only_frac=0.03)
    else:
        raise ValueError(f"unknown network kind {kind!r}")
    rho = 2 * median_walk_edge(net) if use_radius else 0
    cfg = cfg.with_overrides(rho=rho, capacity=capacity)
    fleet = random_fleet(net, vehicles, rng, capacity=capacity, end=service_end)
    return Instance(net, fleet, random_requests(net, requests, rng, horizon), cfg)


def main(argv=None):
    import argparse

    from .instance import write_instance

    p = argparse.ArgumentParser(prog="python3 -m taxishare.generate",
                                description="Write a random instance as CSV files.")
    p.add_argument("directory")
    p.add_argument("--kind", choices=("grid", "geometric"), default="grid")
    p.add_argument("--size", type=int, default=100, help="approximate vertex count")
    p.add_argument("--vehicles", type=int, default=5)
    p.add_argument("--requests", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-radius", action="store_true", help="set rho to 0")
    args = p.parse_args(argv)
    inst = random_instance(args.seed, args.kind, args.size, args.vehicles, args.requests,
                           use_radius=not args.no_radius)
    print(write_instance(inst, args.directory))


if __name__ == "__main__":
    main()
