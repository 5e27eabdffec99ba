"""Benchmark: compiled contraction kernels vs the pure NumPy fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from holv import kernels


def bench(fn, entries, x, repeat=5, min_loops=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        loops = 0
        while time.perf_counter() - t0 < 0.05 or loops < min_loops:
            fn(entries, x)
            loops += 1
        best = min(best, (time.perf_counter() - t0) / loops)
    return best


def main():
    if kernels.BACKEND != "compiled":
        print("compiled backend unavailable; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'case':>16} {'compiled':>12} {'numpy':>12} {'ratio':>8}")
    for m, n in [(3, 4), (3, 8), (3, 16), (3, 32), (4, 8), (4, 16), (5, 8)]:
        entries = rng.normal(size=(n,) * m)
        x = rng.uniform(0.1, 1.0, size=n)
        for name, fc, fp in [
            ("tvp", kernels.tvp_compiled, kernels.tvp_python),
            ("jacobian", kernels.tvp_jacobian_compiled, kernels.tvp_jacobian_python),
        ]:
            ref_c = fc(entries, x)
            ref_p = fp(entries, x)
            assert np.allclose(ref_c, ref_p), (m, n, name)
            tc = bench(fc, entries, x)
            tp = bench(fp, entries, x)
            label = f"{name} m={m} n={n}"
            print(f"{label:>16} {tc * 1e6:>10.1f}us {tp * 1e6:>10.1f}us {tp / tc:>7.2f}x")


if __name__ == "__main__":
    main()
