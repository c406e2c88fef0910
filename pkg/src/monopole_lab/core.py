"""Units, constants and the value types shared across the package.

Gaussian units throughout. The monopole sits at the origin; the electric
charge moves. Magnetic charge is never given directly: it is derived from
the Dirac integer ``n`` so that ``e*g/(hbar*c) == n/2`` holds by
construction.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularPointError, ValidationError

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


def wrap_angle(x):
    """Wrap angle(s) into (-pi, pi]. Works on scalars and arrays."""
    wrapped = math.pi - np.mod(math.pi - np.asarray(x, dtype=float), TWO_PI)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def _finite_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if value <= 0.0:
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalSetup:
    """Charge, monopole and unit constants for one scenario.

    Build instances with :func:`make_setup`; it fixes ``g`` from ``n``.
    """

    e: float
    g: float
    n: int
    hbar: float = 1.0
    c: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "m"):
            _finite_positive(name, getattr(self, name))
        if not math.isfinite(self.e) or self.e == 0.0:
            raise ValidationError(f"e must be finite and non-zero, got {self.e!r}")
        if not math.isfinite(self.g):
            raise ValidationError(f"g must be finite, got {self.g!r}")

    @property
    def coupling(self) -> float:
        """Signed ``e*g/c``; equals ``n*hbar/2``."""
        return self.e * self.g / self.c

    @property
    def spin(self) -> float:
        """Magnitude of the field angular momentum, ``|n|*hbar/2``."""
        return abs(self.coupling)

    def dirac_integer(self) -> int:
        return int(round(2.0 * self.e * self.g / (self.hbar * self.c)))

    def as_dict(self) -> dict:
        return {"e": self.e, "g": self.g, "n": self.n, "hbar": self.hbar, "c": self.c, "m": self.m}


_OVERRIDABLE = ("e", "hbar", "c", "m")


def make_setup(n: int = 1, **overrides: float) -> PhysicalSetup:
    """Return the setup for Dirac integer ``n`` with ``g = n*hbar*c/(2e)``.

    ``overrides`` may replace any of ``e``, ``hbar``, ``c``, ``m`` (all
    default to 1). ``n`` may be negative or zero.
    """
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise ValidationError(f"n must be an integer, got {n!r}")
    unknown = set(overrides) - set(_OVERRIDABLE)
    if unknown:
        raise ValidationError(f"unknown constants: {sorted(unknown)}")
    consts = {"e": 1.0, "hbar": 1.0, "c": 1.0, "m": 1.0}
    for key, value in overrides.items():
        value = float(value)
        if not math.isfinite(value):
            raise ValidationError(f"override {key} must be finite, got {value!r}")
        consts[key] = value
    g = int(n) * consts["hbar"] * consts["c"] / (2.0 * consts["e"])
    return PhysicalSetup(e=consts["e"], g=g, n=int(n), hbar=consts["hbar"], c=consts["c"], m=consts["m"])


def quantization_residual(S: float, hbar: float = 1.0) -> float:
    """Mismatch between the two Type-I phases of a loop, wrapped to (-pi, pi].

    Evaluating the loop phase over the cap and over its complement
    (solid angle lowered by 4*pi) differs by ``-4*pi*S/hbar``; the result
    is zero exactly when ``2*S/hbar`` is an integer.
    """
    S = float(S)
    if not math.isfinite(S):
        raise ValidationError(f"S must be finite, got {S!r}")
    return wrap_angle(-FOUR_PI * S / _finite_positive("hbar", hbar))


def as_vector(value, name: str = "vector") -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValidationError(f"{name} must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite, got {arr}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParticleState:
    """Position/velocity of the charge at a given time (monopole at origin)."""

    position: np.ndarray
    velocity: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        pos = _frozen(as_vector(self.position, "position"))
        vel = _frozen(as_vector(self.velocity, "velocity"))
        if not np.any(pos):
            raise SingularPointError("charge placed on the monopole at the origin")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)
        object.__setattr__(self, "time", float(self.time))

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.position))

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.velocity))


class StringSide(enum.Enum):
    """Which particle terminates a Dirac string."""

    MAGNETIC = "magnetic"
    ELECTRIC = "electric"
    BOTH = "both"


@dataclass(frozen=True)
class StringConfig:
    """A Dirac string leaving the origin along ``direction``."""

    direction: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -1.0]))
    side: StringSide = StringSide.MAGNETIC

    def __post_init__(self):
        d = _frozen(as_vector(self.direction, "string direction"))
        if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
            raise ValidationError(f"string direction must be a unit vector, |d| = {np.linalg.norm(d)!r}")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "side", StringSide(self.side))

    @classmethod
    def along(cls, direction, side: StringSide | str = StringSide.MAGNETIC) -> "StringConfig":
        """Normalise ``direction`` before building the config."""
        d = as_vector(direction, "string direction")
        norm = float(np.linalg.norm(d))
        if norm == 0.0:
            raise ValidationError("string direction must be non-zero")
        return cls(direction=d / norm, side=StringSide(side))

    def as_dict(self) -> dict:
        return {"direction": [float(x) for x in self.direction], "side": self.side.value}


SOUTH_STRING = StringConfig()
NORTH_STRING = StringConfig(direction=np.array([0.0, 0.0, 1.0]))
