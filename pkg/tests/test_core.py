import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monopole_lab.core import (NORTH_STRING, SOUTH_STRING, ParticleState, StringConfig, StringSide,
                               make_setup, quantization_residual, wrap_angle)
from monopole_lab.errors import SingularPointError, ValidationError


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    arr = wrap_angle(np.array([0.0, 2 * math.pi, -5.0]))
    assert np.allclose(arr, [0.0, 0.0, -5.0 + 2 * math.pi])


def test_setup_quantizes_coupling():
    s = make_setup(1)
    assert s.coupling == pytest.approx(0.5)
    assert s.g == pytest.approx(0.5)
    assert make_setup(-3).coupling == pytest.approx(-1.5)
    assert make_setup(0).g == 0.0


def test_setup_overrides():
    s = make_setup(2, e=2.0, hbar=3.0, c=5.0)
    assert s.e * s.g / s.c == pytest.approx(2 * 3.0 / 2)
    assert s.dirac_integer() == 2


@pytest.mark.parametrize("bad", [1.5, True, "1"])
def test_setup_rejects_non_integer_n(bad):
    with pytest.raises(ValidationError):
        make_setup(bad)


def test_setup_rejects_bad_constants():
    with pytest.raises(ValidationError):
        make_setup(1, hbar=float("nan"))
    with pytest.raises(ValidationError):
        make_setup(1, g=1.0)


def test_quantization_residual_examples():
    assert quantization_residual(0.5) == pytest.approx(0.0, abs=1e-12)
    assert quantization_residual(1.0) == pytest.approx(0.0, abs=1e-12)
    # -4*pi*0.6 = -2.4*pi wraps to -0.4*pi
    assert quantization_residual(0.6) == pytest.approx(-0.4 * math.pi, abs=1e-12)


@given(st.integers(-50, 50), st.floats(0.1, 10.0))
def test_residual_vanishes_for_half_integer_multiples(n, hbar):
    assert abs(quantization_residual(n * hbar / 2, hbar)) <= 1e-12 * max(1, abs(n))


@given(st.integers(-20, 20), st.floats(0.5, 3.0), st.floats(0.5, 3.0), st.floats(0.5, 3.0))
def test_dirac_integer_round_trip(n, e, hbar, c):
    s = make_setup(n, e=e, hbar=hbar, c=c)
    assert s.dirac_integer() == n


def test_particle_state_is_immutable():
    state = ParticleState((1, 0, 0), (0, 1, 0))
    assert state.radius == 1.0
    with pytest.raises(ValueError):
        state.position[0] = 2.0


def test_particle_state_rejects_origin():
    with pytest.raises(SingularPointError):
        ParticleState((0, 0, 0), (1, 0, 0))


def test_string_config():
    assert np.array_equal(SOUTH_STRING.direction, [0, 0, -1])
    assert np.array_equal(NORTH_STRING.direction, [0, 0, 1])
    s = StringConfig.along((0, 3, 4), "electric")
    assert np.allclose(s.direction, [0, 0.6, 0.8])
    assert s.side is StringSide.ELECTRIC
    with pytest.raises(ValidationError):
        StringConfig(direction=np.array([0.0, 0.0, 2.0]))
