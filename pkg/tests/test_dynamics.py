import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monopole_lab.core import ParticleState, make_setup
from monopole_lab.dynamics import (TRAJECTORY_COLUMNS, IntegratorSpec, energy_type1, energy_type2, integrate,
                                   step, total_angular_momentum)
from monopole_lab.errors import NearOriginError, OnStringError, ValidationError

S1 = make_setup(1)
START = ParticleState((1.0, 0.0, 0.0), (0.0, 0.5, 0.0))


@pytest.fixture(scope="module")
def orbit():
    return integrate(START, S1, t_end=100.0)


def test_static_charge_only_advances_time():
    nxt = step(ParticleState((1.0, 2.0, 0.5), (0.0, 0.0, 0.0)), S1)
    assert np.array_equal(nxt.position, [1.0, 2.0, 0.5])
    assert np.array_equal(nxt.velocity, [0.0, 0.0, 0.0])
    assert nxt.time > 0


def test_free_flight_without_monopole():
    rec = integrate(START, make_setup(0), t_end=3.0)
    expected = np.array([1.0, 0.0, 0.0]) + np.outer(rec.t, [0.0, 0.5, 0.0])
    assert np.allclose(rec.position, expected, atol=1e-12)


def test_speed_is_exact_per_step():
    state = START
    for _ in range(200):
        state = step(state, S1)
        assert abs(state.speed - 0.5) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.lists(st.floats(-1, 1), min_size=3, max_size=3),
       st.integers(-3, 3))
def test_single_step_invariants(r, v, n):
    r = np.array(r)
    if np.linalg.norm(r) < 0.1:
        r = r + np.array([0.5, 0.0, 0.0])
    state = ParticleState(r, v)
    s = make_setup(n)
    nxt = step(state, s)
    assert abs(nxt.speed - state.speed) <= 1e-12 * max(1.0, state.speed)
    J0 = total_angular_momentum(state, s)
    J1 = total_angular_momentum(nxt, s)
    assert abs(np.linalg.norm(J1) - np.linalg.norm(J0)) <= 1e-12 * max(1.0, np.linalg.norm(J0))
    cone = np.dot(J1, nxt.position / nxt.radius)
    assert cone == pytest.approx(-s.coupling, abs=1e-12)


def test_orbit_cone_invariant(orbit):
    assert orbit.t[-1] >= 100.0
    assert np.max(np.abs(orbit.cone_projection + 0.5)) <= 1e-6


def test_orbit_total_angular_momentum(orbit):
    J = orbit.total_angular_momentum
    norms = np.linalg.norm(J, axis=1)
    assert np.max(np.abs(norms / norms[0] - 1)) <= 1e-6
    # the direction of J drifts at second order in the step
    assert np.max(np.linalg.norm(J - J[0], axis=1)) / norms[0] <= 1e-4


def test_orbit_stays_on_the_cone(orbit):
    # exact motion keeps r_hat . J_hat = -eg/(c |J|) and r >= the closest approach r0 = 1
    jhat = orbit.total_angular_momentum[0] / np.linalg.norm(orbit.total_angular_momentum[0])
    rhat = orbit.position / np.linalg.norm(orbit.position, axis=1)[:, None]
    assert np.allclose(rhat @ jhat, rhat[0] @ jhat, atol=1e-6)
    assert np.min(np.linalg.norm(orbit.position, axis=1)) >= 1.0 - 1e-12


def test_j_minus_s_identity(orbit):
    J = orbit.total_angular_momentum
    rhat = orbit.position / np.linalg.norm(orbit.position, axis=1)[:, None]
    S = -S1.coupling * rhat
    lhs = np.einsum("ij,ij->i", J - S, J - S)
    rhs = np.einsum("ij,ij->i", J, J) - np.einsum("ij,ij->i", S, S)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_energy_examples():
    assert energy_type1(ParticleState((1, 2, 3), (0, 0, 0)), S1) == pytest.approx(1.0)
    assert energy_type1(START, S1) == pytest.approx(1.125)
    radial = ParticleState((0.0, 2.0, 0.0), (0.0, 0.3, 0.0))
    assert energy_type1(radial, S1) == pytest.approx(1 + 0.5 * 0.09)
    assert energy_type2(ParticleState((1, 0, 0), (0, 0, 0)), S1) == pytest.approx(1.0)
    assert energy_type2(START, S1) == pytest.approx(math.sqrt(1.25))
    with pytest.raises(OnStringError):
        energy_type2(ParticleState((0, 0, -1), (0, 0, 0)), S1)


def test_energies_are_constant(orbit):
    e1 = orbit.energy
    e2 = orbit.energy_type2()
    assert np.max(np.abs(e1 / e1[0] - 1)) <= 1e-6
    assert np.max(np.abs(e2 / e2[0] - 1)) <= 1e-6
    # nonrelativistic expansion of the Type-II energy: mc^2 + p^2/2m + O(v^4)
    v2 = orbit.speed**2
    assert np.allclose(e2, e1 - v2**2 / 8, atol=1e-3)


def test_near_origin_error_carries_record():
    head_on = ParticleState((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0))
    with pytest.raises(NearOriginError) as info:
        integrate(head_on, S1, t_end=5.0)
    rec = info.value.record
    assert rec is not None and len(rec) > 1
    assert np.all(np.diff(rec.t) > 0)


def test_step_refuses_inside_r_min():
    with pytest.raises(NearOriginError):
        step(ParticleState((1e-4, 0, 0), (0, 1, 0)), S1, r_min=1e-3)


def test_integrate_needs_a_limit():
    with pytest.raises(ValidationError):
        integrate(START, S1)
    with pytest.raises(ValidationError):
        IntegratorSpec(max_rotation=0.0)


def test_max_steps_and_rows():
    rec = integrate(START, S1, max_steps=37, chunk=10)
    assert len(rec) == 38
    assert rec.rows().shape == (38, len(TRAJECTORY_COLUMNS))
    assert np.all(np.diff(rec.t) > 0)


def test_chunking_does_not_change_the_trajectory():
    a = integrate(START, S1, t_end=20.0, chunk=7)
    b = integrate(START, S1, t_end=20.0)
    assert np.array_equal(a.position, b.position)
