"""Classical motion of the charge about a fixed monopole.

The pusher splits each step into half drift, exact rotation of the
velocity about the local field, half drift. Speed is preserved exactly;
``|J|`` is preserved to roundoff because the drift leaves ``r x v``
untouched and the rotation axis is parallel to the midpoint radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import SOUTH_STRING, ParticleState, PhysicalSetup, StringConfig
from .errors import NearOriginError, ValidationError
from .fields import string_momentum

TRAJECTORY_COLUMNS = ("t", "x", "y", "z", "vx", "vy", "vz", "Jx", "Jy", "Jz", "cone_proj", "speed", "energy")


@dataclass(frozen=True)
class IntegratorSpec:
    """Step-size control for the pusher.

    ``r_min`` of ``None`` means ``r_min_fraction`` of the initial radius.
    """

    max_rotation: float = 0.05
    max_rel_displacement: float = 0.01
    r_min: float | None = None
    r_min_fraction: float = 1e-3

    def __post_init__(self):
        values = [self.max_rotation, self.max_rel_displacement, self.r_min_fraction]
        if self.r_min is not None:
            values.append(self.r_min)
        if not all(math.isfinite(x) and x > 0.0 for x in values):
            raise ValidationError("integrator limits must be finite and positive")

    def resolve_r_min(self, radius: float) -> float:
        return self.r_min if self.r_min is not None else self.r_min_fraction * radius


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled trajectory with conserved-quantity diagnostics at every sample."""

    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    setup: PhysicalSetup
    angular_momentum: np.ndarray = field(init=False)
    total_angular_momentum: np.ndarray = field(init=False)
    cone_projection: np.ndarray = field(init=False)
    speed: np.ndarray = field(init=False)
    energy: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.t.ndim != 1 or self.position.shape != (self.t.size, 3) or self.velocity.shape != (self.t.size, 3):
            raise ValidationError("inconsistent trajectory arrays")
        if np.any(np.diff(self.t) <= 0.0):
            raise ValidationError("trajectory times must be strictly increasing")
        m = self.setup.m
        r = self.position
        rn = np.linalg.norm(r, axis=1)
        rhat = r / rn[:, None]
        L = m * np.cross(r, self.velocity)
        J = L - self.setup.coupling * rhat
        speed = np.linalg.norm(self.velocity, axis=1)
        p_r = m * np.einsum("ij,ij->i", self.velocity, rhat)
        S = -self.setup.coupling * rhat
        JmS2 = np.einsum("ij,ij->i", J - S, J - S)
        energy = m * self.setup.c**2 + (p_r**2 + JmS2 / rn**2) / (2.0 * m)
        for name, value in (
            ("angular_momentum", L),
            ("total_angular_momentum", J),
            ("cone_projection", np.einsum("ij,ij->i", rhat, J)),
            ("speed", speed),
            ("energy", energy),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return self.t.size

    def state(self, i: int) -> ParticleState:
        return ParticleState(self.position[i].copy(), self.velocity[i].copy(), float(self.t[i]))

    def energy_type2(self, string: StringConfig = SOUTH_STRING) -> np.ndarray:
        return np.array([energy_type2(self.state(i), self.setup, string) for i in range(len(self))])

    def rows(self) -> np.ndarray:
        """Table matching ``TRAJECTORY_COLUMNS``."""
        return np.column_stack([
            self.t, self.position, self.velocity, self.total_angular_momentum,
            self.cone_projection, self.speed, self.energy,
        ])


def _kernel_args(state: ParticleState, setup: PhysicalSetup, spec: IntegratorSpec, r_min: float):
    k = setup.e * setup.g / (setup.m * setup.c)
    return (np.array(state.position), np.array(state.velocity), state.time, k,
            spec.max_rotation, spec.max_rel_displacement, r_min)


def step(state: ParticleState, setup: PhysicalSetup, spec: IntegratorSpec | None = None,
         r_min: float | None = None) -> ParticleState:
    """Advance one adaptive step.

    Raises ``NearOriginError`` if the step would bring the charge within
    ``r_min`` (default from ``spec`` relative to the current radius).
    """
    spec = spec or IntegratorSpec()
    r_min = spec.resolve_r_min(state.radius) if r_min is None else r_min
    if state.radius <= r_min:
        raise NearOriginError(f"|r| = {state.radius:.6g} is not above r_min = {r_min:.6g}")
    r0, v0, t0, k, rot, disp, rmin = _kernel_args(state, setup, spec, r_min)
    out_t, out_r, out_v = np.empty(1), np.empty((1, 3)), np.empty((1, 3))
    count, status = kernels.boris_run(r0, v0, t0, math.inf, 1, k, rot, disp, rmin, out_t, out_r, out_v)
    if status == kernels.RUN_NEAR_ORIGIN:
        raise NearOriginError(f"step would enter r < r_min = {r_min:.6g}")
    return ParticleState(out_r[0], out_v[0], float(out_t[0]))


def integrate(state0: ParticleState, setup: PhysicalSetup, spec: IntegratorSpec | None = None,
              t_end: float = math.inf, max_steps: int | None = None, chunk: int = 4096) -> TrajectoryRecord:
    """Integrate from ``state0`` until ``t_end`` or ``max_steps`` steps.

    At least one of the two limits must be finite. On an ``r_min``
    violation a ``NearOriginError`` carrying the partial record is raised.
    """
    spec = spec or IntegratorSpec()
    if not math.isfinite(t_end) and max_steps is None:
        raise ValidationError("give a finite t_end or max_steps")
    if t_end <= state0.time:
        raise ValidationError("t_end must lie after the initial time")
    limit = max_steps if max_steps is not None else np.iinfo(np.int64).max
    r_min = spec.resolve_r_min(state0.radius)
    r, v, t, k, rot, disp, rmin = _kernel_args(state0, setup, spec, r_min)
    ts, rs, vs = [np.array([t])], [r[None, :].copy()], [v[None, :].copy()]
    done = 0
    while True:
        size = int(min(chunk, limit - done))
        out_t, out_r, out_v = np.empty(size), np.empty((size, 3)), np.empty((size, 3))
        count, status = kernels.boris_run(r, v, t, float(t_end), size, k, rot, disp, rmin, out_t, out_r, out_v)
        ts.append(out_t[:count])
        rs.append(out_r[:count])
        vs.append(out_v[:count])
        done += count
        if status == kernels.RUN_NEAR_ORIGIN:
            partial = TrajectoryRecord(np.concatenate(ts), np.vstack(rs), np.vstack(vs), setup)
            raise NearOriginError(f"trajectory reached r < r_min = {r_min:.6g} after {done} steps", partial)
        if count == 0 or done >= limit or out_t[count - 1] >= t_end:
            break
        r, v, t = out_r[count - 1].copy(), out_v[count - 1].copy(), float(out_t[count - 1])
    return TrajectoryRecord(np.concatenate(ts), np.vstack(rs), np.vstack(vs), setup)


def kinetic_angular_momentum(state: ParticleState, setup: PhysicalSetup) -> np.ndarray:
    return setup.m * np.cross(state.position, state.velocity)


def total_angular_momentum(state: ParticleState, setup: PhysicalSetup) -> np.ndarray:
    """J = L + S with S = -(e g / c) r_hat."""
    return kinetic_angular_momentum(state, setup) - setup.coupling * state.position / state.radius


def energy_type1(state: ParticleState, setup: PhysicalSetup) -> float:
    """Nonrelativistic Type-I Hamiltonian evaluated on a classical state.

    ``m c^2 + (p_r^2 + (J - S)^2 / r^2) / (2 m)`` with ``p_r = m v . r_hat``.
    """
    r = state.radius
    rhat = state.position / r
    p_r = setup.m * float(np.dot(state.velocity, rhat))
    J = total_angular_momentum(state, setup)
    S = -setup.coupling * rhat
    JmS = J - S
    return setup.m * setup.c**2 + (p_r**2 + float(np.dot(JmS, JmS)) / r**2) / (2.0 * setup.m)


def energy_type2(state: ParticleState, setup: PhysicalSetup, string: StringConfig = SOUTH_STRING) -> float:
    """Type-II Hamiltonian ``sqrt(c^2 (p - Pi)^2 + m^2 c^4)`` with ``p = m v + Pi``."""
    Pi = string_momentum(state.position, setup, string)
    p = setup.m * state.velocity + Pi
    kin = p - Pi
    c = setup.c
    return math.sqrt(c**2 * float(np.dot(kin, kin)) + setup.m**2 * c**4)
