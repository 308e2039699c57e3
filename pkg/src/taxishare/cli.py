"""Command-line entry point: load an instance, simulate, write stats.csv and events.csv."""
import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .ch import ContractionHierarchy, build_ch
from .config import InstanceConfig, dump_config, load_config
from .instance import InstanceError, load_instance
from .sim import run_simulation, write_outputs

log = logging.getLogger("taxishare")

# flag -> config field, for the flags that map one-to-one
_OVERRIDES = {
    "rho": "rho", "tau": "tau", "omega": "omega", "alpha": "alpha", "beta": "beta",
    "max_wait": "t_wait_max", "gamma_wait": "gamma_wait", "gamma_trip": "gamma_trip",
    "k_elliptic": "k_elliptic", "k_pd": "k_pd", "k_laststop": "k_laststop",
    "mode": "mode", "pals": "pals", "dals": "dals", "seed": "seed",
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="taxishare",
        description="Simulate dynamic taxi sharing with meeting points on a road network.")
    p.add_argument("--network", required=True, help="CSV tail,head,mode,travel_time_ds")
    p.add_argument("--vehicles", required=True,
                   help="CSV initial_location,service_start_ds,service_end_ds,capacity")
    p.add_argument("--requests", required=True, help="CSV origin,destination,t_req_ds")
    p.add_argument("--config", help="key=value file; flags below override it")
    p.add_argument("--out", default="out", help="output directory (default: %(default)s)")
    p.add_argument("--ch-cache", help="load the contraction hierarchy from this file, "
                                      "or build and save it there if missing")
    g = p.add_argument_group("model parameters (times in deciseconds)")
    g.add_argument("--rho", type=int, help="walking radius")
    g.add_argument("--tau", type=Fraction, help="trip-time weight")
    g.add_argument("--omega", type=Fraction, help="walking-time weight")
    g.add_argument("--alpha", type=Fraction, help="trip-time factor")
    g.add_argument("--beta", type=int, help="trip-time offset")
    g.add_argument("--max-wait", type=int, help="maximum wait before a penalty applies")
    g.add_argument("--gamma-wait", type=Fraction, help="wait violation penalty scale")
    g.add_argument("--gamma-trip", type=Fraction, help="trip violation penalty scale")
    s = p.add_argument_group("search")
    for fam in ("elliptic", "pd", "laststop"):
        s.add_argument(f"--k-{fam}", type=int, help=f"batch width of the {fam} searches")
    s.add_argument("--mode", choices=("karri", "oracle", "both"))
    s.add_argument("--pals", choices=("individual", "collective"))
    s.add_argument("--dals", choices=("individual", "collective"))
    s.add_argument("--sorted-buckets", choices=("on", "off"))
    s.add_argument("--seed", type=int, help="recorded in the written config")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args):
    cfg = load_config(args.config) if args.config else InstanceConfig()
    changes = {field: getattr(args, flag) for flag, field in _OVERRIDES.items()
               if getattr(args, flag) is not None}
    if args.sorted_buckets is not None:
        changes["sorted_buckets"] = args.sorted_buckets == "on"
    return cfg.with_overrides(**changes)


def _hierarchy(instance, cache):
    if cache is None:
        return build_ch(instance.network)
    path = Path(cache)
    if path.exists():
        ch = ContractionHierarchy.load(path)
        if ch.n != instance.network.n:
            raise ValueError(f"{path}: hierarchy has {ch.n} vertices, network has "
                             f"{instance.network.n}")
        return ch
    ch = build_ch(instance.network)
    ch.save(path)
    return ch


def run_cli(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        instance = load_instance(args.network, args.vehicles, args.requests, config=cfg)
        ch = _hierarchy(instance, args.ch_cache)
    except (OSError, InstanceError, ValueError) as exc:
        print(f"taxishare: error: {exc}", file=sys.stderr)
        return 1
    log.info("%d vertices, %d vehicles, %d requests", instance.network.n,
             len(instance.vehicles), len(instance.requests))
    result = run_simulation(instance, ch)
    out = write_outputs(result, args.out)
    dump_config(cfg, out / "config.txt")
    if result.mismatches:
        print(f"taxishare: {len(result.mismatches)} requests where dispatcher and oracle "
              "costs differ (see events.csv)", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
