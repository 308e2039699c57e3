"""Time the compiled shortest-path kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--size 2500] [--repeat 3]

Both backends run on the same vehicle graph; results are checked for
equality before any timing is reported.
"""
import argparse
import sys
import timeit

import numpy as np

from taxishare import _pykernels
from taxishare.generate import random_instance

try:
    from taxishare import _kernels
except ImportError:
    _kernels = None


def cases(graph, rng, n):
    roots = rng.integers(0, n, size=8).astype(np.int64)
    offsets = rng.integers(0, 50, size=8).astype(np.int64)
    one = roots[:1].copy()
    zero = np.zeros(1, dtype=np.int64)
    args = (graph.indptr, graph.heads, graph.weights)
    return {
        "sssp (1 root)": lambda k: k.sssp(*args, one, zero),
        "sssp (8 roots, 1 lane)": lambda k: k.sssp(*args, roots, offsets),
        "sssp_batched (k=8)": lambda k: k.sssp_batched(*args, roots, offsets),
        "sssp_parents": lambda k: k.sssp_parents(*args, int(one[0])),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--size", type=int, default=2500, help="grid vertices")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; run pip install -e . --no-build-isolation")
        return 1

    inst = random_instance(args.seed, "grid", args.size, vehicles=1, requests=1)
    graph = inst.network.graph("veh")
    n = inst.network.n
    rng = np.random.default_rng(args.seed)
    print(f"grid, {n} vertices, {len(graph.heads)} edges, best of {args.repeat}")
    print(f"{'kernel':<24} {'compiled ms':>12} {'python ms':>12} {'speedup':>9}")
    for name, run in cases(graph, rng, n).items():
        a, b = run(_kernels), run(_pykernels)
        same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) \
            else np.array_equal(a, b)
        if not same:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        fast = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat))
        slow = min(timeit.repeat(lambda: run(_pykernels), number=1, repeat=args.repeat))
        print(f"{name:<24} {fast * 1e3:>12.2f} {slow * 1e3:>12.2f} {slow / fast:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
