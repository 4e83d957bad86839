import cmath
import math

import pytest
from hypothesis import given, strategies as st

from quartic.model import (DEFAULT_BRANCH, MULTICRITICAL, PhaseRegime, SigmaPoint, ZeroParameter,
                           is_multicritical, potential, sheet_of, sigma_from_u, u_from_sigma)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_potential_value():
    assert potential(1, -2) == pytest.approx(-0.75)


def test_u_at_critical_value():
    s = sigma_from_u(-1 / 12).z
    assert abs(abs(s) - math.sqrt(12)) < 1e-12
    assert abs(s.real) < 1e-12
    assert abs(sigma_from_u(-1 / 12, sheet=-1).z + s) < 1e-12


def test_zero_parameter():
    with pytest.raises(ZeroParameter):
        u_from_sigma(0)
    with pytest.raises(ZeroParameter):
        sigma_from_u(0)


@given(finite, finite)
def test_u_sigma_round_trip(a, b):
    s = complex(a, b)
    if abs(s) < 1e-3:
        return
    u = u_from_sigma(s)
    back = sigma_from_u(u, sheet_of(s)).z
    assert abs(back - s) <= 1e-9 * max(1, abs(s))


@given(finite, finite)
def test_s_squares_back(a, b):
    s = complex(a, b)
    r = DEFAULT_BRANCH.s(s)
    assert abs(r * r - (12 + s * s)) <= 1e-9 * (1 + abs(s) ** 2)


def test_s_positive_on_real_axis():
    for x in (-10, -2, 0, 3.5):
        assert DEFAULT_BRANCH.s(x).real > 0 and DEFAULT_BRANCH.s(x).imag == 0


def test_cut_names():
    assert DEFAULT_BRANCH.on_cut(-1 + math.sqrt(12) * 1j) == "L+"
    assert DEFAULT_BRANCH.on_cut(-1 - math.sqrt(12) * 1j) == "L-"
    assert DEFAULT_BRANCH.on_cut(-3) == "L"
    assert DEFAULT_BRANCH.on_cut(1) is None


def test_sqrt_arg_0_2pi_upper_half():
    for x in (1j, -1, -1j, 2 + 1j):
        r = DEFAULT_BRANCH.sqrt_arg_0_2pi(x)
        assert abs(r * r - x) < 1e-14 and r.imag >= 0


def test_regime_parse():
    assert str(PhaseRegime.parse("two-cut")) == "TwoCut"
    assert PhaseRegime.parse("3").cuts == 3
    assert str(PhaseRegime.parse("MultiCritical(-2)")) == "MultiCritical(-2)"
    with pytest.raises(ValueError):
        PhaseRegime.parse("four")


def test_multicritical_points():
    assert is_multicritical(-2) == "-2"
    assert is_multicritical(1j * math.sqrt(12)) == "+i√12"
    assert is_multicritical(1) is None
    assert len(MULTICRITICAL) == 3


def test_sigma_point_finite():
    with pytest.raises(ValueError):
        SigmaPoint(float("nan"))
    assert SigmaPoint.of(1 + 2j).conj().z == 1 - 2j
