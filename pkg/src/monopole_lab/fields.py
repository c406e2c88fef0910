"""Field quantities of the charge-monopole pair.

Closed forms (monopole field, field angular momentum, string momentum)
plus two volume quadratures that rebuild them from the microscopic
Coulomb and monopole/flux-tube fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import SOUTH_STRING, PhysicalSetup, StringConfig, as_vector
from .errors import OnStringError, QuadratureError, SingularPointError, ValidationError
from .loops import AXIS_CUTOFF, line_integral

STRING_CUTOFF = AXIS_CUTOFF


def _points(r) -> tuple[np.ndarray, bool]:
    arr = np.asarray(r, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != 3:
        raise ValidationError(f"expected 3-vectors, got shape {np.shape(r)}")
    return arr, single


def _radii(pts: np.ndarray) -> np.ndarray:
    rn = np.linalg.norm(pts, axis=1)
    if np.any(rn == 0.0):
        raise SingularPointError("field evaluated at the monopole (origin)")
    return rn


def monopole_field(r, setup: PhysicalSetup) -> np.ndarray:
    """B = g r_hat / r**2. Accepts one point or an (N, 3) array."""
    pts, single = _points(r)
    rn = _radii(pts)
    out = setup.g * pts / rn[:, None] ** 3
    return out[0] if single else out


def field_angular_momentum(r, setup: PhysicalSetup) -> np.ndarray:
    """S = -(e g / c) r_hat, the angular momentum stored in the crossed fields."""
    pts, single = _points(r)
    rn = _radii(pts)
    out = -setup.coupling * pts / rn[:, None]
    return out[0] if single else out


def string_angle(r, string: StringConfig = SOUTH_STRING) -> np.ndarray:
    """Angle between each point's direction and the string half-line."""
    pts, single = _points(r)
    d = string.direction
    out = np.arctan2(np.linalg.norm(np.cross(pts, d), axis=1), pts @ d)
    return out[0] if single else out


def string_momentum(r, setup: PhysicalSetup, string: StringConfig = SOUTH_STRING,
                    cutoff: float = STRING_CUTOFF) -> np.ndarray:
    """Field momentum of a charge at ``r`` for a Dirac string along ``string.direction``.

    With ``a = -direction`` the polar angle is measured from ``a``::

        Pi = (e g / c) (1 - cos t) / (r sin t) * phi_hat
           = (e g / c) (a x r) / (r (r + a.r))

    The second form is used; it is regular on the side away from the
    string. The same expression serves magnetic, electric and double
    string configurations.
    """
    pts, single = _points(r)
    rn = _radii(pts)
    ang = np.arctan2(np.linalg.norm(np.cross(pts, string.direction), axis=1), pts @ string.direction)
    if np.any(ang <= cutoff):
        bad = pts[int(np.argmax(ang <= cutoff))]
        raise OnStringError(f"point {bad} lies within {cutoff:g} rad of the string {string.direction}")
    a = -string.direction
    out = setup.coupling * np.cross(a, pts) / (rn * (rn + pts @ a))[:, None]
    return out[0] if single else out


def central_curl(field, r, h: float = 1e-4, order: int = 4) -> np.ndarray:
    """Central-difference curl of ``field`` at point(s) ``r``.

    ``order=2`` is the plain two-point difference; ``order=4`` (default)
    adds the +-2h points, i.e. Richardson extrapolation of the former.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    pts, single = _points(r)
    jac = np.empty((pts.shape[0], 3, 3))  # jac[:, i, j] = d F_i / d x_j
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        d1 = np.asarray(field(pts + step)) - np.asarray(field(pts - step))
        if order == 2:
            jac[:, :, j] = d1 / (2.0 * h)
        else:
            d2 = np.asarray(field(pts + 2 * step)) - np.asarray(field(pts - 2 * step))
            jac[:, :, j] = (8.0 * d1 - d2) / (12.0 * h)
    curl = np.stack(
        [jac[:, 2, 1] - jac[:, 1, 2], jac[:, 0, 2] - jac[:, 2, 0], jac[:, 1, 0] - jac[:, 0, 1]], axis=1
    )
    return curl[0] if single else curl


def gauge_mismatch(loop, setup: PhysicalSetup, string_a: StringConfig, string_b: StringConfig,
                   tol: float = 1e-11) -> float:
    """Loop integral of ``Pi_a - Pi_b``: the phase action lost by moving the string from a to b.

    For opposite strings this is ``2*pi*n*hbar`` times the winding of the
    loop about ``string_b.direction``; it vanishes for loops that do not
    thread between the strings.
    """
    def diff(x):
        return string_momentum(x, setup, string_a) - string_momentum(x, setup, string_b)

    return line_integral(diff, loop, tol=tol)


# --------------------------------------------------------------------------
# volume quadratures
# --------------------------------------------------------------------------


class QuadratureResult(NamedTuple):
    value: np.ndarray
    error: float


@dataclass(frozen=True)
class ThomsonQuadrature:
    """Resolution of the field-angular-momentum volume quadrature.

    Radial nodes are log-spaced on ``[inner, outer] * |r|`` and graded
    geometrically (``grading`` per level) toward the charge radius; polar
    nodes are graded toward the charge direction. The discarded inner ball
    and outer shell are restored from their leading multipole terms.
    """

    inner: float = 1e-3
    outer: float = 1e3
    order: int = 12
    levels: int = 14
    grading: float = 0.2
    n_phi: int = 8
    tol: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.inner < 1.0 < self.outer):
            raise ValidationError("need 0 < inner < 1 < outer")
        if self.order < 2 or self.levels < 1 or self.n_phi < 4:
            raise ValidationError("order >= 2, levels >= 1, n_phi >= 4 required")
        if not 0.0 < self.grading < 1.0:
            raise ValidationError("grading must lie in (0, 1)")

    def coarser(self) -> "ThomsonQuadrature":
        return ThomsonQuadrature(self.inner, self.outer, max(self.order - 4, 2), max(self.levels - 3, 1),
                                 self.grading, self.n_phi, self.tol)


def _graded_breaks(length: float, levels: int, grading: float, uniform: int) -> np.ndarray:
    """Breakpoints on [0, length] refined geometrically toward 0."""
    tiny = length * grading ** np.arange(levels, 0, -1)
    coarse = np.linspace(tiny[-1] if levels else 0.0, length, uniform + 1)[1:] if uniform else np.array([])
    return np.concatenate([[0.0], tiny, coarse[coarse > tiny[-1]]])


def _composite_gauss(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.reshape(-1), weights.reshape(-1)


def _local_frame(axis: np.ndarray) -> np.ndarray:
    """Rotation matrix whose third row is ``axis``."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - axis * np.dot(helper, axis)
    e1 /= np.linalg.norm(e1)
    return np.vstack([e1, np.cross(axis, e1), axis])


def _thomson_once(d: float, setup: PhysicalSetup, q: ThomsonQuadrature) -> np.ndarray:
    span_in = -math.log(q.inner)
    span_out = math.log(q.outer)
    below = _graded_breaks(span_in, q.levels, q.grading, 8)
    above = _graded_breaks(span_out, q.levels, q.grading, 8)
    u_breaks = np.concatenate([-below[::-1], above[1:]])
    u, wu = _composite_gauss(u_breaks, q.order)
    R = d * np.exp(u)
    wR = wu * R**3  # R**2 dR with dR = R du
    t_breaks = _graded_breaks(math.pi, q.levels, q.grading, 8)
    th, wth = _composite_gauss(t_breaks, q.order)
    wth = wth * np.sin(th)
    phi = (np.arange(q.n_phi) + 0.5) * (2.0 * math.pi / q.n_phi)
    wphi = np.full(q.n_phi, 2.0 * math.pi / q.n_phi)
    core = kernels.thomson_sum(R, wR, th, wth, phi, wphi, d, setup.e, setup.g, setup.c)
    # discarded regions, leading order along the charge axis:
    # inner ball  -(eg/c) (inner)^2 / 3,  outer shell  -(2/3)(eg/c) / outer
    core = core.copy()
    core[2] += -setup.coupling * (q.inner**2 / 3.0 + (2.0 / 3.0) / q.outer)
    return core


def thomson_integral(r_charge, setup: PhysicalSetup, quad: ThomsonQuadrature | None = None) -> QuadratureResult:
    """Volume integral (1/4 pi c) int x cross (E_e cross B) d^3x, done numerically.

    Uses the genuine Coulomb field of the charge and the monopole field;
    the error estimate combines a coarser-resolution rerun with the size
    of the next multipole term of the truncated regions.
    """
    quad = quad or ThomsonQuadrature()
    r = as_vector(r_charge, "r_charge")
    d = float(np.linalg.norm(r))
    if d == 0.0:
        raise SingularPointError("charge on the monopole")
    frame = _local_frame(r / d)
    fine = _thomson_once(d, setup, quad)
    rough = _thomson_once(d, setup, quad.coarser())
    truncation = abs(setup.coupling) * (quad.inner**3 + 1.0 / quad.outer**2)
    error = float(np.linalg.norm(fine - rough)) + truncation
    scale = max(abs(setup.coupling), 1e-300)
    if error > quad.tol * scale:
        raise QuadratureError(f"thomson_integral error estimate {error:.3g} exceeds tol {quad.tol:g} (relative)")
    return QuadratureResult(frame.T @ fine, error)


@dataclass(frozen=True)
class FluxTube:
    """Finite uniform flux tube of radius ``radius`` running from the origin along ``direction``."""

    direction: np.ndarray = np.array([0.0, 0.0, -1.0])
    radius: float = 0.01
    length: float = 200.0

    def __post_init__(self):
        d = as_vector(self.direction, "direction")
        if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
            raise ValidationError("tube direction must be a unit vector")
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)
        if not self.radius > 0.0:
            raise ValidationError("tube radius must be positive")
        if not self.length > self.radius:
            raise ValidationError("tube length must exceed its radius")

    @classmethod
    def for_string(cls, string: StringConfig, radius: float = 0.01, length: float = 200.0) -> "FluxTube":
        return cls(np.array(string.direction), radius, length)

    def interior_field(self, setup: PhysicalSetup) -> float:
        """Uniform axial field carrying total flux 4 pi g toward the monopole."""
        return 4.0 * setup.g / self.radius**2


@dataclass(frozen=True)
class TubeQuadrature:
    order: int = 10
    n_rho: int = 4
    n_phi: int = 16
    tol: float = 1e-2


def _tube_once(q_local: np.ndarray, setup: PhysicalSetup, tube: FluxTube, quad: TubeQuadrature) -> np.ndarray:
    qx, qy, qz = (float(x) for x in q_local)
    # along-axis breakpoints: geometric around the charge's foot point, scale = its offset
    foot = min(max(-qz, 0.0), tube.length)
    scale = max(math.hypot(qx, qy), tube.radius)
    offsets = scale * 2.0 ** np.arange(-6, 64) * 0.5
    pts = np.concatenate([[0.0, tube.length, foot], foot - offsets, foot + offsets])
    pts = np.unique(np.clip(pts, 0.0, tube.length))
    steps = np.unique(np.concatenate([pts, np.linspace(0.0, tube.length, 9)]))
    s, ws = _composite_gauss(steps, quad.order)
    rho_x, rho_w = np.polynomial.legendre.leggauss(quad.n_rho)
    rho = 0.5 * tube.radius * (rho_x + 1.0)
    wrho = 0.5 * tube.radius * rho_w * rho
    phi = (np.arange(quad.n_phi) + 0.5) * (2.0 * math.pi / quad.n_phi)
    wphi = np.full(quad.n_phi, 2.0 * math.pi / quad.n_phi)
    b0 = tube.interior_field(setup)
    return kernels.tube_sum(s, ws, rho, wrho, phi, wphi, qx, qy, qz, setup.e, b0, setup.c)


def flux_tube_momentum(r_charge, setup: PhysicalSetup, tube: FluxTube | None = None,
                       quad: TubeQuadrature | None = None) -> QuadratureResult:
    """(1/4 pi c) int E_e cross B d^3x over the interior of a finite flux tube.

    The error estimate adds the rerun difference at lower order, the
    dropped part of the string beyond ``length`` and the finite-radius
    correction ``(radius/distance)**2``.
    """
    tube = tube or FluxTube()
    quad = quad or TubeQuadrature()
    r = as_vector(r_charge, "r_charge")
    frame = _local_frame(-tube.direction)  # tube runs along local -z
    q_local = frame @ r
    offset = math.hypot(q_local[0], q_local[1])
    if offset <= tube.radius and -tube.length <= q_local[2] <= 0.0:
        raise SingularPointError("charge lies inside the flux tube")
    fine = _tube_once(q_local, setup, tube, quad)
    rough = _tube_once(q_local, setup, tube, TubeQuadrature(max(quad.order - 4, 2), quad.n_rho, quad.n_phi, quad.tol))
    distance = math.hypot(offset, q_local[2] + min(max(-q_local[2], 0.0), tube.length))
    coupling = abs(setup.coupling)
    r_norm = float(np.linalg.norm(r))
    tail = coupling * r_norm / max(tube.length - r_norm, tube.radius) ** 2
    finite = coupling * (tube.radius / max(distance, tube.radius)) ** 2 / max(distance, tube.radius)
    error = float(np.linalg.norm(fine - rough)) + tail + finite
    if error > quad.tol * max(coupling / max(r_norm, 1e-300), 1e-300):
        raise QuadratureError(f"flux_tube_momentum error estimate {error:.3g} exceeds tol {quad.tol:g}")
    return QuadratureResult(frame.T @ fine, error)
