"""Foucault pendulum in a rotating lab and its link to the Type-I phase.

The pendulum is linearized in local flat coordinates (u east, v north) at
latitude ``lam`` on a frame spinning at ``omega0``. With
``wz = omega0 sin(lam)`` the equations of motion are::

    u'' = -(wp^2 - omega0^2) u + 2 wz v'
    v'' = -(wp^2 - wz^2) v - 2 wz u'

(Coriolis plus the centrifugal term). The linear system is advanced with
the Cayley map of the generator, which conserves the co-rotating energy
exactly, and the plane azimuth is read from second moments averaged over
each fast period.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import PhysicalSetup
from .errors import ToleranceError, ValidationError
from .phases import type1_phase

ADIABATIC_RATIO = 50.0


class AdiabaticityWarning(UserWarning):
    """Pendulum frequency not well above the frame rotation rate."""


@dataclass(frozen=True)
class RotatingFrameSpec:
    """Lab rotation rate, latitude (radians), pendulum frequency and mass.

    ``steps_per_period`` is the number of Cayley steps per fast pendulum
    period; precession converges as ``O(dt^2)``.
    """

    omega0: float = 1.0
    latitude: float = math.pi / 6
    frequency: float = 200.0
    mass: float = 1.0
    steps_per_period: int = 4000

    def __post_init__(self):
        for name in ("omega0", "frequency", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValidationError(f"{name} must be finite and positive, got {value!r}")
        if not (math.isfinite(self.latitude) and -math.pi / 2 <= self.latitude <= math.pi / 2):
            raise ValidationError(f"latitude must lie in [-pi/2, pi/2], got {self.latitude!r}")
        if int(self.steps_per_period) != self.steps_per_period or self.steps_per_period < 8:
            raise ValidationError("steps_per_period must be an integer >= 8")
        if self.ratio <= 1.0:
            raise ValidationError("pendulum frequency must exceed the frame rotation rate")
        if self.ratio < ADIABATIC_RATIO:
            warnings.warn(
                f"frequency ratio {self.ratio:.3g} is below {ADIABATIC_RATIO:g}; precession is not adiabatic",
                AdiabaticityWarning,
                stacklevel=3,
            )

    @classmethod
    def from_ratio(cls, ratio: float, latitude: float = math.pi / 6, omega0: float = 1.0,
                   **kwargs) -> "RotatingFrameSpec":
        return cls(omega0=omega0, latitude=latitude, frequency=ratio * omega0, **kwargs)

    @property
    def ratio(self) -> float:
        return self.frequency / self.omega0

    @property
    def revolution_time(self) -> float:
        return 2.0 * math.pi / self.omega0

    def generator(self) -> np.ndarray:
        """Matrix ``A`` of ``x' = A x`` for ``x = (u, v, u', v')``."""
        wz = self.omega0 * math.sin(self.latitude)
        ku = self.frequency**2 - self.omega0**2
        kv = self.frequency**2 - wz**2
        return np.array([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-ku, 0.0, 0.0, 2.0 * wz],
            [0.0, -kv, -2.0 * wz, 0.0],
        ])

    def energy(self, states: np.ndarray) -> np.ndarray:
        """Co-rotating (Jacobi) energy, centrifugal potential included."""
        states = np.atleast_2d(states)
        wz = self.omega0 * math.sin(self.latitude)
        u, v, du, dv = states.T
        return 0.5 * self.mass * (
            du**2 + dv**2 + (self.frequency**2 - self.omega0**2) * u**2 + (self.frequency**2 - wz**2) * v**2
        )


@dataclass(frozen=True)
class PendulumResult:
    precession: float
    per_revolution: float
    revolutions: float
    energy_drift: float
    window_times: np.ndarray
    azimuth: np.ndarray


def simulate_pendulum(spec: RotatingFrameSpec, revolutions: float = 1.0, amplitude: float = 1.0) -> PendulumResult:
    """Swing the pendulum, released at rest along ``u``, for ``revolutions`` frame turns.

    The precession is the least-squares slope of the unwrapped plane
    azimuth times the elapsed time, so it is free of the fast-phase
    wobble an endpoint reading would pick up.
    """
    if not (math.isfinite(revolutions) and revolutions > 0.0):
        raise ValidationError("revolutions must be finite and positive")
    spw = int(spec.steps_per_period)
    n_windows = int(round(revolutions * spec.ratio))
    if n_windows < 2:
        raise ValidationError("run too short: fewer than two pendulum periods")
    h = 2.0 * math.pi / spec.frequency / spw
    eye = np.eye(4)
    half = 0.5 * h * spec.generator()
    M = np.linalg.solve(eye - half, eye + half)
    x0 = np.array([float(amplitude), 0.0, 0.0, 0.0])
    moments, marks = kernels.pendulum_run(M, x0, n_windows, spw)

    azimuth = 0.5 * np.unwrap(np.arctan2(2.0 * moments[:, 2], moments[:, 0] - moments[:, 1]))
    times = (np.arange(n_windows) * spw + 0.5 * (spw + 1)) * h
    rate = np.polyfit(times, azimuth, 1)[0]
    elapsed = n_windows * spw * h
    energy = spec.energy(marks)
    drift = float(np.max(np.abs(energy / energy[0] - 1.0)))
    per_rev = rate * spec.revolution_time
    return PendulumResult(float(rate * elapsed), float(per_rev), elapsed / spec.revolution_time, drift, times, azimuth)


def latitude_solid_angle(latitude: float) -> float:
    """Solid angle of the cap north of ``latitude``: ``2 pi (1 - sin(lam))``."""
    return 2.0 * math.pi * (1.0 - math.sin(latitude))


class PrecessionComparison(NamedTuple):
    precession: float
    omega_minus_2pi: float
    residual: float


def precession_vs_solid_angle(latitude: float, spec: RotatingFrameSpec | None = None) -> PrecessionComparison:
    """Simulated precession per revolution next to ``Omega - 2 pi`` of the latitude loop."""
    if not (-math.pi / 2 < latitude <= math.pi / 2):
        raise ValidationError("latitude must lie in (-pi/2, pi/2]")
    if spec is None:
        spec = RotatingFrameSpec(latitude=latitude)
    elif spec.latitude != latitude:
        raise ValidationError("spec latitude differs from the requested latitude")
    precession = simulate_pendulum(spec).per_revolution
    target = latitude_solid_angle(latitude) - 2.0 * math.pi
    return PrecessionComparison(float(precession), target, float(precession - target))


class Type1Correspondence(NamedTuple):
    foucault: float
    phi: float
    residual: float


def type1_correspondence(latitude: float, setup: PhysicalSetup, spec: RotatingFrameSpec | None = None,
                         tol: float = 1e-3) -> Type1Correspondence:
    """Foucault precession versus the Type-I phase of the latitude loop for ``S = hbar``.

    Only ``n = 2`` has ``|S| = hbar``; any other setup is rejected. Raises
    ``ToleranceError`` if the two differ by more than ``tol``.
    """
    if setup.n != 2:
        raise ValidationError(f"the Foucault correspondence needs n = 2, got n = {setup.n}")
    cmp = precession_vs_solid_angle(latitude, spec)
    phi = type1_phase(latitude_solid_angle(latitude), setup)
    residual = float(cmp.precession - phi)
    if abs(residual) > tol:
        raise ToleranceError(f"Foucault precession {cmp.precession:.9g} differs from phase {phi:.9g}")
    return Type1Correspondence(cmp.precession, phi, residual)
