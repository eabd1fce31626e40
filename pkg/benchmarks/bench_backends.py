"""Timing comparison of the two kernel backends.

Runs each batch kernel and one exhaustive-oracle solve under both the
numba-jitted and the pure-numpy kernels and prints a speedup table.

    python3 benchmarks/bench_backends.py [--batch 20000] [--repeats 5]

Standalone utility; not collected by pytest.
"""

import argparse
import time

import numpy as np

import ordsub as o


def best_of(repeats, call):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        call()
        best = min(best, time.perf_counter() - start)
    return best


def random_batch(rng, n, length, rows):
    return rng.integers(0, n, size=(rows, length), dtype=np.int64)


def build_cases(batch_rows):
    rng = np.random.default_rng(0)
    cov = o.random_coverage(0, 40, 12, 6)
    cal = o.random_calibration(0, 40, 8, 10, with_quality=True,
                               quality_tradeoff=0.3)
    kl = o.random_calibration(1, 40, 8, 10)
    cov_batch = random_batch(rng, 40, 8, batch_rows)
    cal_batch = random_batch(rng, 40, 10, batch_rows)
    oracle_fn = o.make_coverage_fn(o.random_coverage(3, 10, 6, 4))
    return [
        ("coverage batch", lambda: o.make_coverage_fn(cov)
            .evaluate_batch(cov_batch)),
        ("hellinger batch", lambda: o.make_calibration_fn(
            cal, o.hellinger_spec()).evaluate_batch(cal_batch)),
        ("power:0.5 batch", lambda: o.make_calibration_fn(
            cal, o.power_spec(0.5)).evaluate_batch(cal_batch)),
        ("log-score batch", lambda: o.make_kl_fn(kl)
            .evaluate_batch(cal_batch)),
        ("oracle n=10 k=5", lambda: o.brute_force_optimum(oracle_fn, 5)),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=20000,
                        help="rows per kernel batch (default 20000)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best-of (default 5)")
    args = parser.parse_args()

    cases = build_cases(args.batch)
    timings = {}
    for backend in ("numba", "numpy"):
        try:
            o.select_backend(backend)
        except ImportError:
            print(f"backend {backend} unavailable, skipping")
            continue
        for name, call in cases:
            call()  # warm: JIT compile / page in
            timings[(backend, name)] = best_of(args.repeats, call)

    print(f"{'benchmark':<18} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, _ in cases:
        fast = timings.get(("numba", name))
        slow = timings.get(("numpy", name))
        fast_s = f"{fast * 1e3:8.2f}ms" if fast is not None else "     n/a"
        slow_s = f"{slow * 1e3:8.2f}ms" if slow is not None else "     n/a"
        ratio = f"{slow / fast:7.1f}x" if fast and slow else "     n/a"
        print(f"{name:<18} {fast_s:>10} {slow_s:>10} {ratio:>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
