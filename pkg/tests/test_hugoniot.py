import math

import numpy as np
import pytest

from bnsf_shock import (
    GasConstants,
    ShockData,
    State,
    check_lax,
    make_shock,
    rh_residual,
    right_state,
    shock_speed,
    sigma_star,
)


@pytest.fixture
def left():
    return State(1.0, 0.0, 1.0)


def test_sigma_star_is_acoustic_speed(left, gas):
    s = sigma_star(left, 3, gas)
    assert s == pytest.approx(math.sqrt(1.4), abs=1e-12)
    assert sigma_star(left, 1, gas) == -s


def test_family3_worked_speed(left, gas):
    # closed form: sqrt(1.4 / 1.012)
    s = shock_speed(left, 0.01, 3, gas)
    assert s == pytest.approx(1.1761796, abs=1e-6)
    assert s == pytest.approx(math.sqrt(1.4 / 1.012), rel=1e-15)


def test_family3_worked_right_state(left, gas):
    r = right_state(left, 0.01, 3, gas)
    assert r.v == pytest.approx(1.01, abs=1e-12)
    assert r.u == pytest.approx(-0.0117618, abs=1e-6)
    assert r.theta == pytest.approx(0.9960277, abs=1e-6)


def test_family1_exact_closed_form(left, gas):
    # signed jump delta = -eps enters the denominator
    s = shock_speed(left, 0.01, 1, gas)
    assert s == pytest.approx(-math.sqrt(1.4 / 0.988), rel=1e-15)
    assert s < 0


@pytest.mark.parametrize("family", [1, 3])
def test_energy_jump_closes_exactly(left, gas, family):
    shock = make_shock(left, 0.01, family, gas)
    res = rh_residual(shock.left, shock.right, shock.sigma_eps, gas)
    assert np.max(np.abs(res)) <= 1e-12


def test_rh_residuals_random_admissible(gas):
    rng = np.random.default_rng(42)
    for _ in range(100):
        left = State(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0))
        family = int(rng.choice([1, 3]))
        eps = rng.uniform(0.001, 0.04) * left.v
        shock = make_shock(left, eps, family, gas)
        scale = max(1.0, abs(shock.sigma_eps)) ** 2 * max(left.v, left.theta, abs(left.u), 1.0)
        res = rh_residual(shock.left, shock.right, shock.sigma_eps, gas)
        assert np.max(np.abs(res)) <= 1e-10 * scale
        assert check_lax(shock.left, shock.right) == family


def test_lax_sign_patterns(left, gas):
    s3 = make_shock(left, 0.02, 3, gas)
    assert s3.right.v > left.v and s3.right.u < left.u and s3.right.theta < left.theta
    s1 = make_shock(left, 0.02, 1, gas)
    assert s1.right.v < left.v and s1.right.u < left.u and s1.right.theta > left.theta
    with pytest.raises(ValueError):
        check_lax(left, State(1.1, 0.5, 1.1))


def test_speed_gap_scales_linearly(left, gas):
    # |sigma_eps - sigma_*| / eps tends to (gamma+1) sigma_* / (4 v_-)
    expected = 2.4 * math.sqrt(1.4) / 4.0
    gaps = []
    for eps in (1e-3, 1e-4, 1e-5):
        gaps.append(abs(shock_speed(left, eps, 3, gas) - sigma_star(left, 3, gas)) / eps)
    assert gaps[-1] == pytest.approx(expected, rel=1e-4)
    # and the convergence is monotone in eps
    assert abs(gaps[2] - expected) < abs(gaps[0] - expected)


def test_amplitude_validity_guards(left, gas):
    with pytest.raises(ValueError):
        shock_speed(left, -0.01, 3, gas)
    with pytest.raises(ValueError):
        shock_speed(left, 0.25, 3, gas)
    with pytest.warns(UserWarning):
        shock_speed(left, 0.08, 3, gas)


def test_shock_data_dict_round_trip(left, gas):
    shock = make_shock(left, 0.03, 3, gas)
    d = shock.to_dict()
    assert set(d) == {
        "v_minus", "u_minus", "theta_minus", "v_plus", "u_plus", "theta_plus",
        "eps", "sigma_eps", "sigma_star", "family", "A",
    }
    assert ShockData.from_dict(d) == shock


def test_bad_family_rejected(left, gas):
    with pytest.raises(ValueError):
        shock_speed(left, 0.01, 2, gas)
