"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --sizes 200,800 --repeat 3
"""

import argparse
import time

import numpy as np

from wspan import _pykernels
from wspan.generators import random_graph
from wspan.light import d_light_initialization

try:
    from wspan import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1000.0


def run(sizes, repeat, budget, seed):
    rows = []
    for n in sizes:
        g = random_graph(n, min(n * (n - 1) // 2, 8 * n), seed=seed)
        args = (g.indptr, g.nbr, g.nbr_w, g.nbr_eid)
        in_h = d_light_initialization(g, 3).mask
        cases = {
            "sssp": lambda k: k.sssp(*args, g.full_mask, 0),
            "constrained_sssp": lambda k: k.constrained_sssp(*args, in_h, 0, budget),
        }
        for name, call in cases.items():
            py_ms = _best(lambda: call(_pykernels), repeat)
            c_ms = _best(lambda: call(_ckernels), repeat) if _ckernels else float("nan")
            rows.append((name, n, g.m, py_ms, c_ms, py_ms / c_ms))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="200,800,3200")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--budget", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    sizes = [int(x) for x in args.sizes.split(",")]
    if _ckernels is None:
        print("compiled extension not built; python timings only")
    print(f"{'kernel':<18}{'n':>7}{'m':>8}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for name, n, m, py_ms, c_ms, ratio in run(sizes, args.repeat, args.budget, args.seed):
        print(f"{name:<18}{n:>7}{m:>8}{py_ms:>12.2f}{c_ms:>12.2f}{ratio:>8.1f}x")


if __name__ == "__main__":
    main()
