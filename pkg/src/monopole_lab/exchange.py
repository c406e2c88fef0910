"""Exchange of two charge-monopole composites.

The relative coupling of the pair is the difference field
``D(r) = Pi(r) - Pi(-r)``. It is curl-free off the string, and its
integral along any exchange path C from r to -r equals the loop integral
of Pi around the centrally symmetric loop C + (-C), i.e. ``n*pi*hbar``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import SOUTH_STRING, PhysicalSetup, StringConfig, as_vector, make_setup, wrap_angle
from .errors import SingularPointError, ToleranceError, ValidationError
from .fields import STRING_CUTOFF, string_angle, string_momentum
from .loops import OpenPath, line_integral


@dataclass(frozen=True)
class CompositeSpec:
    """Intrinsic spin ``s`` (integer or half-integer) and Dirac integer ``n``."""

    s: Fraction
    n: int

    def __post_init__(self):
        try:
            two_s = Fraction(self.s) * 2
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"spin must be numeric, got {self.s!r}") from exc
        if two_s.denominator != 1 or two_s < 0:
            raise ValidationError(f"2s must be a non-negative integer, got s={self.s}")
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValidationError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "s", two_s / 2)
        object.__setattr__(self, "n", int(self.n))

    @property
    def two_s(self) -> int:
        return int(self.s * 2)


def relative_momentum_field(r, setup: PhysicalSetup, string: StringConfig = SOUTH_STRING) -> np.ndarray:
    """``Pi(r) - Pi(-r)`` for both composites sharing one string direction."""
    pts = np.asarray(r, dtype=float)
    return string_momentum(pts, setup, string) - string_momentum(-pts, setup, string)


def great_circle_exchange(start=(1.0, 0.0, 0.0), via=(0.0, 1.0, 0.0), n_vertices: int = 181) -> OpenPath:
    """Half great circle from ``start`` to ``-start`` through the direction ``via``."""
    start = as_vector(start, "start")
    radius = float(np.linalg.norm(start))
    if radius == 0.0:
        raise SingularPointError("exchange path cannot start at the origin")
    e1 = start / radius
    via = as_vector(via, "via")
    e2 = via - e1 * np.dot(via, e1)
    if np.linalg.norm(e2) < 1e-12:
        raise ValidationError("via must not be parallel to start")
    e2 /= np.linalg.norm(e2)
    t = np.linspace(0.0, math.pi, n_vertices)
    return OpenPath(radius * (np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2)))


def random_exchange_path(rng: np.random.Generator, start=(1.0, 0.0, 0.0),
                         string: StringConfig = SOUTH_STRING, n_vertices: int = 241,
                         modes: int = 3, min_angle: float = 0.1, max_tries: int = 1000) -> OpenPath:
    """Wiggly path on the sphere through ``start`` ending at ``-start``.

    The path sweeps the polar angle about ``start`` from 0 to pi while its
    azimuth follows a random Fourier series; candidates whose path or
    mirror image comes within ``min_angle`` of the string are rejected.
    """
    start = as_vector(start, "start")
    radius = float(np.linalg.norm(start))
    e1 = start / radius
    helper = np.array([1.0, 0.0, 0.0]) if abs(e1[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = helper - e1 * np.dot(helper, e1)
    u /= np.linalg.norm(u)
    w = np.cross(e1, u)
    t = np.linspace(0.0, 1.0, n_vertices)
    for _ in range(max_tries):
        beta = rng.uniform(0.0, 2.0 * math.pi) + sum(
            rng.normal(0.0, 1.0) * np.sin(k * math.pi * t) for k in range(1, modes + 1)
        )
        side = np.outer(np.cos(beta), u) + np.outer(np.sin(beta), w)
        pts = radius * (np.outer(np.cos(math.pi * t), e1) + np.sin(math.pi * t)[:, None] * side)
        both = np.vstack([pts, -pts])
        if np.min(string_angle(both, string)) > min_angle:
            return OpenPath(pts)
    raise ValidationError("could not draw an exchange path avoiding the string")


def exchange_phase(path: OpenPath, setup: PhysicalSetup, string: StringConfig = SOUTH_STRING,
                   tol: float = 1e-6, quad_tol: float = 1e-11) -> float:
    """``(1/hbar) * integral over C of (Pi(r) - Pi(-r)) . dr``.

    The path must join a point to its mirror image; the result is checked
    to equal ``n*pi`` modulo ``2*pi`` within ``tol``.
    """
    v = path.vertices
    if not np.allclose(v[-1], -v[0], rtol=0.0, atol=1e-12 * np.linalg.norm(v[0])):
        raise ValidationError("an exchange path must end at the mirror image of its start")
    if np.min(string_angle(np.vstack([v, -v]), string)) <= STRING_CUTOFF:
        raise ValidationError("exchange path or its mirror image touches the string")
    alpha = line_integral(lambda x: relative_momentum_field(x, setup, string), path, tol=quad_tol) / setup.hbar
    if abs(wrap_angle(alpha - setup.n * math.pi)) > tol:
        raise ToleranceError(f"exchange phase {alpha:.12g} is not n*pi mod 2*pi for n={setup.n}")
    return alpha


def exchange_statistics(spec: CompositeSpec) -> int:
    """Exchange sign ``(-1)**(2s + n)``."""
    return -1 if (spec.two_s + spec.n) % 2 else 1


def type1_statistics(spec: CompositeSpec) -> int:
    """Sign from the total angular momentum ``j = s + n/2`` of one composite.

    Without a relative coupling the composites are independent particles,
    so spin-statistics applies to ``j`` directly.
    """
    two_j = spec.two_s + spec.n
    return -1 if two_j % 2 else 1


def type2_statistics(spec: CompositeSpec, path: OpenPath | None = None,
                     string: StringConfig = SOUTH_STRING, tol: float = 1e-6) -> int:
    """Sign ``(-1)**(2s) * exp(i * exchange_phase)`` from an explicit exchange path."""
    setup = make_setup(spec.n)
    path = path if path is not None else great_circle_exchange()
    alpha = exchange_phase(path, setup, string, tol=tol)
    value = (-1) ** spec.two_s * cmath.exp(1j * alpha)
    if abs(value.imag) > tol or abs(abs(value.real) - 1.0) > tol:
        raise ToleranceError(f"exchange factor {value} is not real +-1")
    return 1 if value.real > 0 else -1
