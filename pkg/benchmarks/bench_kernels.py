"""Time the numba kernels against their pure-numpy / interpreted fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each compiled kernel is called once before timing so JIT compilation is
excluded; outputs of both flavours are compared before timing.
"""
from __future__ import annotations

import argparse
import json
import math
import time

import numpy as np

from monopole_lab import kernels
from monopole_lab.coriolis import RotatingFrameSpec
from monopole_lab.loops import cap_loop


def _best(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def case_boris(steps=20_000):
    def call(run):
        out = (np.empty(steps), np.empty((steps, 3)), np.empty((steps, 3)))
        return run(np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.5, 0.0]), 0.0, math.inf, steps,
                   -0.5, 0.05, 5e-4, 1e-3, *out), out[1]

    return f"boris pusher, {steps} steps", call, kernels.boris_run_numba, kernels.boris_run_numpy


def case_fan(vertices=20_000):
    v = cap_loop(1.0, vertices, axis=(0.2, 0.1, 1.0)).vertices
    units = v / np.linalg.norm(v, axis=1)[:, None]
    pivot = np.array([0.2, 0.1, 1.0]) / math.sqrt(1.05)
    return (f"solid-angle fan, {vertices} vertices", lambda run: run(units, pivot),
            kernels.solid_angle_fan_numba, kernels.solid_angle_fan_numpy)


def case_thomson(nodes=120):
    x, w = np.polynomial.legendre.leggauss(nodes)
    R, wR = np.exp(3 * x), 3 * w * np.exp(9 * x)
    th = (x + 1) * math.pi / 2
    wth = w * math.pi / 2 * np.sin(th)
    ph = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    wph = np.full(8, math.pi / 4)
    return (f"thomson volume sum, {nodes}x{nodes}x8 nodes",
            lambda run: run(R, wR, th, wth, ph, wph, 1.0, 1.0, 0.5, 1.0),
            kernels.thomson_sum_numba, kernels.thomson_sum_numpy)


def case_pendulum(windows=200, spw=2000):
    spec = RotatingFrameSpec.from_ratio(windows, steps_per_period=spw)
    h = 2 * math.pi / spec.frequency / spw
    A = spec.generator()
    M = np.linalg.solve(np.eye(4) - h / 2 * A, np.eye(4) + h / 2 * A)
    x0 = np.array([1.0, 0.0, 0.0, 0.0])
    return (f"pendulum map, {windows * spw} steps", lambda run: run(M, x0, windows, spw)[0],
            kernels.pendulum_run_numba, kernels.pendulum_run_numpy)


def _result(value):
    return value[1] if isinstance(value, tuple) else value


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", help="also write the timings here")
    args = parser.parse_args(argv)

    rows = []
    for label, call, fast, slow in (case_boris(), case_fan(), case_thomson(), case_pendulum()):
        a = _result(call(fast))  # compiles
        b = _result(call(slow))
        agree = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        t_fast = _best(lambda: call(fast), args.repeat)
        t_slow = _best(lambda: call(slow), args.repeat)
        rows.append({"kernel": label, "numba_s": t_fast, "fallback_s": t_slow,
                     "speedup": t_slow / t_fast, "max_abs_diff": agree})

    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba [s]':>10}  {'fallback [s]':>12}  {'speedup':>8}  {'max diff':>9}")
    for r in rows:
        print(f"{r['kernel']:<{width}}  {r['numba_s']:10.4f}  {r['fallback_s']:12.4f}  "
              f"{r['speedup']:8.1f}  {r['max_abs_diff']:9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
