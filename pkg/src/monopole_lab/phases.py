"""Loop phases of the two monopole descriptions and their duality.

Type I (field angular momentum) gives ``(eg/hbar c) * Omega - n*pi`` for a
loop of solid angle ``Omega``; Type II (string field momentum) gives the
geometric phase ``(1/hbar) * loop integral of Pi``. They differ by
``n*pi`` modulo ``2*pi``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import SOUTH_STRING, PhysicalSetup, StringConfig, wrap_angle
from .errors import AxisCrossingError, ToleranceError
from .fields import string_momentum
from .loops import Circle, line_integral, random_loop, solid_angle, winding_number

PHASE_COLUMNS = ("n", "omega", "phi1", "phi2", "delta_mod_2pi", "winding")


def type1_phase(omega: float, setup: PhysicalSetup) -> float:
    """``(e g / hbar c) * omega - n * pi`` (unwrapped)."""
    return setup.coupling / setup.hbar * float(omega) - setup.n * math.pi


def type2_phase(path, setup: PhysicalSetup, string: StringConfig = SOUTH_STRING,
                tol: float = 1e-6, quad_tol: float = 1e-11, check: bool = True) -> float:
    """Geometric phase ``(1/hbar) * loop integral of Pi . dr`` by quadrature.

    With ``check`` the result is compared, modulo ``2*pi``, against
    ``(e g / hbar c) * solid_angle``; a disagreement beyond ``tol`` raises
    ``ToleranceError``.
    """
    phase = line_integral(lambda x: string_momentum(x, setup, string), path, tol=quad_tol) / setup.hbar
    if check:
        geometric = setup.coupling / setup.hbar * _omega(path)
        gap = wrap_angle(phase - geometric)
        if abs(gap) > tol:
            raise ToleranceError(f"Type-II phase {phase:.12g} disagrees with geometric {geometric:.12g} by {gap:.3g}")
    return phase


def _omega(path) -> float:
    if isinstance(path, Circle):
        # exact cap, sign and multiplicity from the turns
        return 2.0 * math.pi * (1.0 - math.cos(path.theta)) * path.turns
    return solid_angle(path).omega


@dataclass(frozen=True)
class PhaseReport:
    n: int
    omega: float
    phi_type1: float
    phi_type2: float
    delta_mod_2pi: float
    winding: int | None = None

    def row(self) -> list:
        return [self.n, self.omega, self.phi_type1, self.phi_type2, self.delta_mod_2pi,
                "" if self.winding is None else self.winding]

    def as_dict(self) -> dict:
        return asdict(self)


def duality_report(path, setup: PhysicalSetup, string: StringConfig = SOUTH_STRING,
                   tol: float = 1e-6) -> PhaseReport:
    """Both loop phases and their wrapped difference, asserted to equal ``n*pi`` mod ``2*pi``."""
    omega = _omega(path)
    phi1 = type1_phase(omega, setup)
    phi2 = type2_phase(path, setup, string, tol=tol)
    delta = wrap_angle(phi2 - phi1)
    if abs(wrap_angle(delta - setup.n * math.pi)) > tol:
        raise ToleranceError(f"phase difference {delta:.12g} is not n*pi mod 2*pi for n={setup.n}")
    try:
        wind = winding_number(path, string.direction).number
    except AxisCrossingError:  # loop touches the string axis line
        wind = None
    return PhaseReport(setup.n, omega, phi1, phi2, delta, wind)


def amplitude_ratio(n: int) -> int:
    """Closed-loop amplitude ratio between the two descriptions, ``(-1)**n``."""
    return -1 if int(n) % 2 else 1


def azimuthal_gauge_field(setup: PhysicalSetup, axis=(0.0, 0.0, 1.0)):
    """``a = (n/2) grad(phi)``, phi the azimuth about ``axis``; returns a vector field."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half_n = setup.n / 2.0

    def a(x):
        x = np.atleast_2d(x)
        perp = x - np.outer(x @ axis, axis)
        return half_n * np.cross(axis, perp) / np.einsum("ij,ij->i", perp, perp)[:, None]

    return a


def unitary_loop_condition(path, setup: PhysicalSetup, axis=(0.0, 0.0, 1.0), tol: float = 1e-12) -> float:
    """Loop integral of the gauge field of ``U = exp(-i S.phi/hbar)``; equals ``n*pi`` per winding."""
    winding_number(path, axis)  # raises if the path touches the axis
    return line_integral(azimuthal_gauge_field(setup, axis), path, tol=tol)


def random_duality_reports(setup: PhysicalSetup, count: int, seed: int,
                           string: StringConfig = SOUTH_STRING, tol: float = 1e-6) -> list[PhaseReport]:
    """Reports for ``count`` seeded random polygons avoiding both halves of the string axis."""
    rng = np.random.default_rng(seed)
    avoid = (tuple(string.direction), tuple(-string.direction))
    return [duality_report(random_loop(rng, avoid=avoid), setup, string, tol) for _ in range(count)]
