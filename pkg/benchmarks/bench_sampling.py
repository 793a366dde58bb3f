"""Compare the compiled and pure-numpy sampling kernels.

Both backends produce bit-identical counts; this script measures how long
each takes across shot counts and prints the speedup. Run from the repo
root after installing the package:

    python benchmarks/bench_sampling.py
"""

from __future__ import annotations

import time

import numpy as np

from eprkit._kernels import backends


def representative_tables(d: int = 5, n: int = 4, seed: int = 0):
    """CDF tables shaped like a 4-level factor with 5 sum outcomes."""
    rng = np.random.default_rng(seed)
    p = rng.random(d)
    sum_cdf = np.cumsum(p / p.sum())
    sum_cdf[-1] = 1.0
    cond = rng.random((d, n))
    cond_cdf = np.cumsum(cond / cond.sum(axis=1, keepdims=True), axis=1)
    cond_cdf[:, -1] = 1.0
    return sum_cdf, cond_cdf


def best_of(fn, repeats: int = 5) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    table = backends()
    sum_cdf, cond_cdf = representative_tables()
    shot_counts = [10_000, 100_000, 1_000_000]

    print(f"backends available: {', '.join(sorted(table))}")
    header = f"{'shots':>10} | " + " | ".join(f"{name:>12}" for name in sorted(table))
    if len(table) > 1:
        header += " | speedup"
    print(header)
    print("-" * len(header))

    for shots in shot_counts:
        results = {}
        timings = {}
        for name in sorted(table):
            fn = table[name]
            results[name] = fn(7, shots, sum_cdf, cond_cdf)
            timings[name] = best_of(lambda: fn(7, shots, sum_cdf, cond_cdf))
        counts = list(results.values())
        for other in counts[1:]:
            assert np.array_equal(counts[0], other), "backends disagree"
        row = f"{shots:>10} | " + " | ".join(f"{timings[name] * 1e3:>9.3f} ms" for name in sorted(table))
        if len(table) > 1:
            row += f" | {timings['python'] / timings['compiled']:>6.2f}x"
        print(row)

    if len(table) > 1:
        print("\ncounts are bit-identical across backends at every size")


if __name__ == "__main__":
    main()
