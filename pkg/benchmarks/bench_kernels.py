"""Compiled vs numpy kernels: cycle continuation and partition sums.

    python3 benchmarks/bench_kernels.py --period 16 --repeat 3
"""
import argparse
import time

import numpy as np

from juliamanhattan import kernels
from juliamanhattan.orbits import path_nodes, primitive_cycle_indices


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--period", type=int, default=16)
    ap.add_argument("--c", type=complex, default=0.05 + 0.0j)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rows = primitive_cycle_indices(2, args.period)
    Z0 = np.exp(2j * np.pi * rows / (2 ** args.period - 1))
    nodes = path_nodes([0j, args.c])
    print(f"period {args.period}: {rows.shape[0]} cycles, {nodes.size - 1} steps")

    results = {}
    for name in ("python", "cython"):
        try:
            kernels.get_backend(name)
        except ImportError:
            print(f"{name:>7}: not built")
            continue
        t, out = best_of(lambda: kernels.track_cycles(Z0, nodes, 2, 1e-11, 50, 20,
                                                      backend=name), args.repeat)
        results[name] = out[0]
        print(f"{name:>7}: track_cycles {t:8.3f} s")

    lam = np.sort(np.random.default_rng(0).uniform(0.6, 0.75, 200_000)) * 18
    offsets = np.zeros(19, dtype=np.int64)
    offsets[18] = lam.size
    for name in ("python", "cython"):
        if name not in results:
            continue
        t, _ = best_of(lambda: kernels.log_partition_sums(lam, lam, offsets, 0.5, 0.5, 18,
                                                          backend=name), args.repeat)
        print(f"{name:>7}: log_partition_sums {t:8.4f} s")

    if len(results) == 2:
        diff = np.max(np.abs(results["python"] - results["cython"]))
        print(f"max |Z_python - Z_cython| = {diff:.3g}")


if __name__ == "__main__":
    main()
