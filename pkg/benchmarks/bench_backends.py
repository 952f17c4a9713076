"""Times the JIT kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_backends.py [--quick]

Both backends are imported directly, so no environment variable is
needed here; EXALOGLOG_BACKEND only controls which one the library picks
at import time.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import exaloglog._kernels_numba as numba_kernels
import exaloglog._kernels_numpy as numpy_kernels
from exaloglog._bits import decode_hashes
from exaloglog.params import Params


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads, fewer repeats")
    args = parser.parse_args()

    n = 10 ** 5 if args.quick else 10 ** 6
    n_mart = 10 ** 4 if args.quick else 10 ** 5
    repeats = 2 if args.quick else 5

    params = Params(2, 20, 12)
    rng = np.random.default_rng(1)
    hashes = rng.integers(0, 2 ** 64 - 1, size=n, dtype=np.uint64,
                          endpoint=True)
    idx, u = decode_hashes(hashes, params.t, params.p)

    backends = (("numba", numba_kernels), ("numpy", numpy_kernels))

    # warm up the JIT so compilation never lands in a measurement
    warm = np.zeros(params.m, dtype=np.uint64)
    numba_kernels.apply_updates(warm, idx[:10], u[:10], params.d)
    numba_kernels.apply_updates_martingale(
        warm.copy(), idx[:10], u[:10], params.t, params.d, params.p, 0.0, 1.0)
    numba_kernels.coefficient_arrays(warm, params.t, params.d, params.p)

    results: dict[str, dict[str, float]] = {}

    for name, kernels in backends:
        timings = {}

        def bulk():
            regs = np.zeros(params.m, dtype=np.uint64)
            kernels.apply_updates(regs, idx, u, params.d)

        timings[f"bulk insert ({n} hashes)"] = timeit(bulk, repeats)

        def martingale():
            regs = np.zeros(params.m, dtype=np.uint64)
            kernels.apply_updates_martingale(
                regs, idx[:n_mart], u[:n_mart],
                params.t, params.d, params.p, 0.0, 1.0)

        timings[f"martingale insert ({n_mart} hashes)"] = timeit(
            martingale, repeats)

        filled = np.zeros(params.m, dtype=np.uint64)
        kernels.apply_updates(filled, idx, u, params.d)

        def coefficients():
            kernels.coefficient_arrays(filled, params.t, params.d, params.p)

        timings[f"coefficients ({params.m} registers)"] = timeit(
            coefficients, repeats * 4)

        results[name] = timings

    width = max(len(k) for k in results["numba"])
    print(f"{'workload':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for key in results["numba"]:
        a = results["numba"][key]
        b = results["numpy"][key]
        print(f"{key:<{width}}  {a * 1e3:>10.2f}ms  {b * 1e3:>10.2f}ms  "
              f"{b / a:>7.1f}x")


if __name__ == "__main__":
    main()
