#!/usr/bin/env python3
"""Timing comparison: compiled stepping kernels vs the numpy fallback.

Runs the fixed-step loops on representative workloads (resonant reference
run, a long detuned run, and a wide-truncation run), checks that both
backends produce the same trajectory, and prints per-step timings with the
speedup.  Usage:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from casimir import CavityParams, _kernels_py
from casimir.evolution import (
    _full_operators,
    _linear_operators,
    vacuum_qp_state,
    vacuum_x_state,
)

try:
    from casimir import _kernels as compiled
except ImportError:
    compiled = None

WORKLOADS = [
    # label, gamma, K, periods (steps = 200/period)
    ("full K=16, 16 periods (resonant reference)", 2.0, 16, 16),
    ("full K=16, 50 periods (detuned scan)", 2.5, 16, 50),
    ("full K=32, 16 periods (wide truncation)", 2.0, 32, 16),
]

LINEAR_WORKLOADS = [
    ("linearized K=16, 50 periods", 2.0, 16, 50),
    ("linearized K=32, 16 periods", 2.0, 32, 16),
]


def time_full(kernel, p, nsteps, repeats):
    G, M2, omk0 = _full_operators(p)
    h = p.drive_period / 200.0
    best = float("inf")
    out = None
    for _ in range(repeats):
        s = vacuum_qp_state(p)
        Q, P = s.Q.copy(), s.P.copy()
        start = time.perf_counter()
        kernel(Q, P, G, M2, omk0, p.epsilon, p.Omega, 0.0, h, nsteps)
        best = min(best, time.perf_counter() - start)
        out = (Q, P)
    return best, out


def time_linear(kernel, p, nsteps, repeats):
    w0, Vp, Vm = _linear_operators(p)
    h = p.drive_period / 200.0
    best = float("inf")
    out = None
    for _ in range(repeats):
        X = vacuum_x_state(p).X.copy()
        start = time.perf_counter()
        kernel(X, w0, Vp, Vm, p.epsilon, p.Omega, 0.0, h, nsteps)
        best = min(best, time.perf_counter() - start)
        out = X
    return best, out


def agree(a, b):
    return all(np.allclose(x, y, rtol=1e-10, atol=1e-13)
               for x, y in zip(np.atleast_1d(a), np.atleast_1d(b)))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats per workload (best is kept)")
    args = parser.parse_args()

    if compiled is None:
        print("compiled kernels are not built; only the numpy fallback "
              "is available")
    header = f"{'workload':<44} {'steps':>6} {'numpy':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for label, gamma, K, periods in WORKLOADS:
        p = CavityParams.from_periods(1e-3, gamma, periods, K=K)
        nsteps = 200 * periods
        t_py, out_py = time_full(_kernels_py.rk4_full, p, nsteps, args.repeats)
        if compiled is not None:
            t_cy, out_cy = time_full(compiled.rk4_full, p, nsteps,
                                     args.repeats)
            assert agree(out_py, out_cy), "backend trajectories diverged"
            print(f"{label:<44} {nsteps:>6} {t_py:>9.3f}s {t_cy:>9.3f}s "
                  f"{t_py / t_cy:>7.1f}x")
        else:
            print(f"{label:<44} {nsteps:>6} {t_py:>9.3f}s {'-':>10} {'-':>8}")

    for label, gamma, K, periods in LINEAR_WORKLOADS:
        p = CavityParams.from_periods(1e-3, gamma, periods, K=K)
        nsteps = 200 * periods
        t_py, out_py = time_linear(_kernels_py.rk4_linear, p, nsteps,
                                   args.repeats)
        if compiled is not None:
            t_cy, out_cy = time_linear(compiled.rk4_linear, p, nsteps,
                                       args.repeats)
            assert agree(out_py, out_cy), "backend trajectories diverged"
            print(f"{label:<44} {nsteps:>6} {t_py:>9.3f}s {t_cy:>9.3f}s "
                  f"{t_py / t_cy:>7.1f}x")
        else:
            print(f"{label:<44} {nsteps:>6} {t_py:>9.3f}s {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
