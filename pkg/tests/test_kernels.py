"""Compiled and fallback kernels must agree; the backend flag must select between them."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from monopole_lab import kernels
from monopole_lab._accel import BACKEND_ENV, HAS_NUMBA
from monopole_lab.coriolis import RotatingFrameSpec
from monopole_lab.loops import random_loop

pytestmark = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def _buffers(n):
    return np.empty(n), np.empty((n, 3)), np.empty((n, 3))


def test_boris_flavours_agree_bitwise():
    args = (np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.5, 0.0]), 0.0, 100.0, 10_000, -0.5, 0.05, 0.01, 1e-3)
    a, b = _buffers(1000), _buffers(1000)
    ca = kernels.boris_run_numba(*args, *a)
    cb = kernels.boris_run_numpy(*args, *b)
    assert ca == cb
    n = ca[0]
    for x, y in zip(a, b):
        assert np.array_equal(x[:n], y[:n])


def test_boris_near_origin_status():
    # near the origin the rotation limit makes steps scale like r^2, so allow many of them
    args = (np.array([1.0, 0.0, 0.0]), np.array([-1.0, 0.0, 0.0]), 0.0, 10.0, 200_000, -0.5, 0.05, 0.01, 1e-2)
    for run in (kernels.boris_run_numba, kernels.boris_run_numpy):
        _, status = run(*args, *_buffers(200_000))
        assert status == kernels.RUN_NEAR_ORIGIN


def test_solid_angle_flavours_agree():
    rng = np.random.default_rng(1)
    for _ in range(10):
        v = random_loop(rng).vertices
        units = v / np.linalg.norm(v, axis=1)[:, None]
        pivot = units.mean(axis=0)
        pivot /= np.linalg.norm(pivot)
        assert kernels.solid_angle_fan_numba(units, pivot) == pytest.approx(
            kernels.solid_angle_fan_numpy(units, pivot), abs=1e-12)


def test_thomson_flavours_agree():
    x, w = np.polynomial.legendre.leggauss(6)
    R, wR = 1.0 + x * 0.5, w * 0.5
    th, wth = (x + 1) * math.pi / 2, w * math.pi / 2 * np.sin((x + 1) * math.pi / 2)
    ph = np.linspace(0, 2 * math.pi, 5, endpoint=False)
    wph = np.full(5, 2 * math.pi / 5)
    a = kernels.thomson_sum_numba(R, wR, th, wth, ph, wph, 0.7, 1.0, 0.5, 1.0)
    b = kernels.thomson_sum_numpy(R, wR, th, wth, ph, wph, 0.7, 1.0, 0.5, 1.0)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


def test_tube_flavours_agree():
    x, w = np.polynomial.legendre.leggauss(5)
    s, ws = (x + 1) * 2.0, w * 2.0
    rho, wrho = (x + 1) * 0.005, w * 0.005 * (x + 1) * 0.005
    ph = np.linspace(0, 2 * math.pi, 6, endpoint=False)
    wph = np.full(6, 2 * math.pi / 6)
    a = kernels.tube_sum_numba(s, ws, rho, wrho, ph, wph, 1.0, 0.2, -0.5, 1.0, 2e4, 1.0)
    b = kernels.tube_sum_numpy(s, ws, rho, wrho, ph, wph, 1.0, 0.2, -0.5, 1.0, 2e4, 1.0)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


def test_pendulum_flavours_agree():
    spec = RotatingFrameSpec.from_ratio(60, latitude=0.5, steps_per_period=200)
    h = 2 * math.pi / spec.frequency / spec.steps_per_period
    A = spec.generator()
    M = np.linalg.solve(np.eye(4) - h / 2 * A, np.eye(4) + h / 2 * A)
    x0 = np.array([1.0, 0.0, 0.0, 0.0])
    ma, ka = kernels.pendulum_run_numba(M, x0, 60, 200)
    mb, kb = kernels.pendulum_run_numpy(M, x0, 60, 200)
    # the two pendulum modes are nearly degenerate, so the eigenbasis route loses a few digits
    assert np.allclose(ma, mb, rtol=1e-7, atol=1e-9)
    assert np.allclose(ka, kb, rtol=1e-7, atol=1e-7)


def _backend_in_subprocess(value):
    env = dict(os.environ, **{BACKEND_ENV: value})
    code = "import monopole_lab; print(monopole_lab.backend_name())"
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)


def test_backend_flag():
    assert _backend_in_subprocess("numpy").stdout.strip() == "numpy"
    assert _backend_in_subprocess("numba").stdout.strip() == "numba"
    bad = _backend_in_subprocess("fortran")
    assert bad.returncode != 0 and BACKEND_ENV in bad.stderr
