"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-N wall time for both backends, the speedup and
the max abs difference of the outputs.  The first numba call (JIT compile) is
done before timing.
"""

import argparse
import time

import numpy as np

from qdef_osc import _kernels as K


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _diff(a, b):
    if isinstance(a, tuple):
        return max(float(np.max(np.abs(x - y))) for x, y in zip(a[:2], b[:2]))
    return float(np.max(np.abs(a - b)))


CASES = {
    # single long trajectory (50 periods at 2000 steps): numpy pays per-step call overhead
    "rk4_pdm 1x100k": (
        lambda k: k(np.array([0.0]), np.array([1.0]), 2 * np.pi / 2000, 100_000, 1.0, 1.0, 0.5),
        K.rk4_pdm_numba, K.rk4_pdm_numpy),
    "rk4_pdm 256x2k": (
        lambda k: k(np.linspace(-0.9, 0.9, 256), np.zeros(256), 2 * np.pi / 2000, 2000, 1.0, 1.0, 0.5),
        K.rk4_pdm_numba, K.rk4_pdm_numpy),
    "rk4_morse 1x100k": (
        lambda k: k(np.array([0.3]), np.array([0.0]), 1e-3, 100_000, 1.0, 1.0, 2.0),
        K.rk4_morse_numba, K.rk4_morse_numpy),
    "laguerre n=60 1e6": (
        lambda k: k(60, 120.5, np.linspace(0, 400, 1_000_000)),
        K.laguerre_array_numba, K.laguerre_array_numpy),
    "hermite n=40 1e6": (
        lambda k: k(40, np.linspace(-10, 10, 1_000_000)),
        K.hermite_functions_numba, K.hermite_functions_numpy),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<20}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max|diff|':>12}")
    for name, (call, fast, slow) in CASES.items():
        call(fast)  # compile
        tf, a = best_of(lambda: call(fast), args.repeat)
        ts, b = best_of(lambda: call(slow), args.repeat)
        print(f"{name:<20}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}{_diff(a, b):>12.1e}")


if __name__ == "__main__":
    main()
