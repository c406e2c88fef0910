import math
import warnings

import numpy as np
import pytest

from monopole_lab.coriolis import (AdiabaticityWarning, RotatingFrameSpec, latitude_solid_angle,
                                   precession_vs_solid_angle, simulate_pendulum, type1_correspondence)
from monopole_lab.core import make_setup
from monopole_lab.errors import ValidationError


@pytest.mark.parametrize("lat_deg,expected", [(90, -2 * math.pi), (30, -math.pi), (0, 0.0), (-45, math.sqrt(2) * math.pi)])
def test_precession_per_revolution(lat_deg, expected):
    res = simulate_pendulum(RotatingFrameSpec(latitude=math.radians(lat_deg)))
    assert res.per_revolution == pytest.approx(expected, abs=1e-3 * max(1.0, abs(expected)))


def test_several_revolutions_accumulate():
    res = simulate_pendulum(RotatingFrameSpec.from_ratio(100, steps_per_period=1000), revolutions=3)
    assert res.precession == pytest.approx(-3 * math.pi, rel=1e-3)


def test_energy_conserved():
    res = simulate_pendulum(RotatingFrameSpec(latitude=0.7))
    assert res.energy_drift <= 1e-6


def test_second_order_convergence():
    # at fixed frequency ratio successive halvings of dt shrink the change fourfold;
    # differences remove the small step-independent adiabatic offset
    per = [simulate_pendulum(RotatingFrameSpec.from_ratio(200, steps_per_period=spp)).per_revolution
           for spp in (200, 400, 800, 1600)]
    d = np.abs(np.diff(per))
    assert d[0] / d[1] == pytest.approx(4.0, rel=0.05)
    assert d[1] / d[2] == pytest.approx(4.0, rel=0.05)


def test_residual_shrinks_with_frequency_ratio():
    res = [abs(precession_vs_solid_angle(math.pi / 6, RotatingFrameSpec.from_ratio(q)).residual)
           for q in (50, 200, 800)]
    assert res[0] > res[1] > res[2]


@pytest.mark.parametrize("lat,target", [(math.pi / 6, -math.pi), (math.pi / 2, -2 * math.pi), (0.0, 0.0)])
def test_precession_vs_solid_angle(lat, target):
    cmp = precession_vs_solid_angle(lat)
    assert cmp.omega_minus_2pi == pytest.approx(target, abs=1e-12)
    assert abs(cmp.residual) <= 1e-3


@pytest.mark.parametrize("lat,phi", [(math.pi / 6, -math.pi), (math.pi / 2, -2 * math.pi), (0.0, 0.0)])
def test_type1_correspondence(lat, phi):
    corr = type1_correspondence(lat, make_setup(2))
    assert corr.phi == pytest.approx(phi, abs=1e-12)
    assert abs(corr.residual) <= 1e-3


def test_type1_correspondence_needs_n2():
    with pytest.raises(ValidationError):
        type1_correspondence(0.5, make_setup(1))


def test_latitude_solid_angle():
    assert latitude_solid_angle(math.pi / 6) == pytest.approx(math.pi)
    assert latitude_solid_angle(-math.pi / 2) == pytest.approx(4 * math.pi)


def test_adiabaticity_warning():
    with pytest.warns(AdiabaticityWarning):
        RotatingFrameSpec.from_ratio(20)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        RotatingFrameSpec.from_ratio(50)


@pytest.mark.parametrize("kwargs", [{"omega0": 0.0}, {"latitude": 2.0}, {"frequency": 0.5}, {"steps_per_period": 3}])
def test_spec_validation(kwargs):
    with pytest.raises(ValidationError):
        RotatingFrameSpec(**kwargs)


def test_generator_is_cayley_stable():
    spec = RotatingFrameSpec(latitude=0.4)
    h = 2 * math.pi / spec.frequency / spec.steps_per_period
    A = spec.generator()
    M = np.linalg.solve(np.eye(4) - h / 2 * A, np.eye(4) + h / 2 * A)
    assert np.allclose(np.abs(np.linalg.eigvals(M)), 1.0, atol=1e-12)
