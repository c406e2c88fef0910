import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monopole_lab.core import NORTH_STRING, SOUTH_STRING, PhysicalSetup, make_setup, wrap_angle
from monopole_lab.errors import AxisCrossingError, OnStringError, ToleranceError
from monopole_lab.loops import Circle, ClosedPath, cap_loop, equator, random_loop
from monopole_lab.phases import (PHASE_COLUMNS, amplitude_ratio, duality_report, random_duality_reports,
                                 type1_phase, type2_phase, unitary_loop_condition)


def test_type1_examples():
    assert type1_phase(2 * math.pi, make_setup(1)) == pytest.approx(0.0)
    assert type1_phase(math.pi, make_setup(1)) == pytest.approx(-math.pi / 2)
    assert wrap_angle(type1_phase(0.0, make_setup(2))) == pytest.approx(0.0, abs=1e-15)


def test_type2_examples():
    assert type2_phase(Circle(math.pi / 2), make_setup(1)) == pytest.approx(math.pi, abs=1e-8)
    assert type2_phase(Circle(math.pi / 3), make_setup(2)) == pytest.approx(math.pi, abs=1e-8)
    assert type2_phase(Circle(math.pi / 3), make_setup(0)) == 0.0


def test_type2_on_string():
    with pytest.raises(OnStringError):
        type2_phase(ClosedPath(np.array([[1.0, 0, -1], [-1.0, 0, -1], [0, 1.0, 1]])), make_setup(1))


def test_type2_cross_check_flags_unquantized_charge():
    # with eg/c off the half-integer lattice the two caps of a loop give different phases
    loose = PhysicalSetup(e=1.0, g=0.3, n=1)
    loop = cap_loop(1.0, 120).reversed()
    with pytest.raises(ToleranceError):
        type2_phase(loop, loose)
    assert type2_phase(loop, make_setup(1)) == pytest.approx(-0.5 * 2 * math.pi * (1 - math.cos(1.0)), abs=1e-3)


@given(st.integers(-6, 6), st.floats(-20, 20))
def test_complement_consistency(n, omega):
    s = make_setup(n)
    assert abs(wrap_angle(type1_phase(omega, s) - type1_phase(omega - 4 * math.pi, s))) <= 1e-10


@pytest.mark.parametrize("n,expected", [(1, math.pi), (2, 0.0), (3, math.pi), (0, 0.0)])
def test_duality_delta(n, expected):
    rep = duality_report(cap_loop(1.1, 90, axis=(0.2, 0.1, 1.0)), make_setup(n))
    assert abs(wrap_angle(rep.delta_mod_2pi - expected)) <= 1e-9
    assert rep.winding == -1  # counterclockwise about +z is clockwise about the -z string


@pytest.mark.parametrize("n", [1, 2, 3])
def test_duality_over_random_loops(n):
    reports = random_duality_reports(make_setup(n), 100, seed=n)
    gaps = [abs(wrap_angle(r.phi_type2 - r.phi_type1 - n * math.pi)) for r in reports]
    assert len(reports) == 100
    assert max(gaps) <= 1e-6


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_string_position_independence(seed, n):
    s = make_setup(n)
    loop = random_loop(np.random.default_rng(seed), avoid=((0, 0, -1), (0, 0, 1)))
    south = type2_phase(loop, s, SOUTH_STRING)
    north = type2_phase(loop, s, NORTH_STRING)
    assert math.remainder(south - north, 2 * math.pi) == pytest.approx(0, abs=1e-6)


@pytest.mark.parametrize("n", [0, 1, 2, 3, -1])
def test_amplitude_ratio(n):
    assert amplitude_ratio(n) == (-1) ** n
    rep = duality_report(Circle(0.8), make_setup(n))
    assert cmath.exp(1j * rep.delta_mod_2pi) == pytest.approx(amplitude_ratio(n), abs=1e-9)


def test_unitary_loop_condition():
    s = make_setup(1)
    assert unitary_loop_condition(Circle(math.pi / 2), s) == pytest.approx(math.pi, abs=1e-8)
    assert unitary_loop_condition(Circle(math.pi / 2, turns=2), s) == pytest.approx(2 * math.pi, abs=1e-8)
    assert unitary_loop_condition(cap_loop(0.4, axis=(1, 0, 0)), s) == pytest.approx(0.0, abs=1e-8)
    assert unitary_loop_condition(equator(50).reversed(), make_setup(3)) == pytest.approx(-3 * math.pi, abs=1e-8)
    with pytest.raises(AxisCrossingError):
        unitary_loop_condition(ClosedPath(np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])), s)


def test_report_serialization():
    rep = duality_report(Circle(1.0), make_setup(2))
    assert len(rep.row()) == len(PHASE_COLUMNS)
    assert rep.as_dict()["n"] == 2
