import numpy as np
import pytest

from bnsf_shock import (
    ReducedPoint,
    State,
    builtin_models,
    compute_A,
    critical_manifold,
    critical_point_scan,
    g_derivative_check,
    h_derivative_check,
    make_field,
    solve_theta,
    to_slow_fast,
)
from bnsf_shock.reduction import (
    base_g_matrix,
    base_g_second_block,
    base_h_matrix,
    base_h_second,
    base_h_theta_matrix,
    eval_h,
)

MODEL_ARGS = {"constant": {}, "power_law": {"beta": 0.5}, "eek": {}}


def _field(gas, left, model, eps=0.01):
    return make_field(left, eps, 3, gas, builtin_models(model, **MODEL_ARGS[model]))


def test_base_point_annihilates_h(gas, left_unit):
    f = _field(gas, left_unit, "eek")
    p = ReducedPoint(left_unit.v, 0.0, 0.0, 0.0)
    np.testing.assert_allclose(eval_h(p, left_unit.theta, 0.0, f), 0.0, atol=1e-15)


def test_solve_theta_recovers_base(gas, left_unit):
    f = _field(gas, left_unit, "constant")
    th, thp = solve_theta(ReducedPoint(1.0, 0.0, 0.0, 0.0), f)
    assert th == pytest.approx(1.0, abs=1e-13)
    assert thp == pytest.approx(0.0, abs=1e-13)


def test_solve_theta_residual_small_off_base(gas, left_unit):
    f = _field(gas, left_unit, "eek")
    p = ReducedPoint(1.02, 0.3, -0.1, 0.01)
    th, thp = solve_theta(p, f)
    res = eval_h(p, th, thp, f)
    assert np.max(np.abs(res)) <= 1e-12


def test_solve_theta_box_guards(gas, left_unit):
    f = _field(gas, left_unit, "constant")
    with pytest.raises(ValueError):
        solve_theta(ReducedPoint(1.6, 0.0, 0.0, 0.0), f)
    with pytest.raises(ValueError):
        solve_theta(ReducedPoint(1.0, 50.0, 0.0, 0.0), f)


def test_constant_A_worked_value(gas, left_unit):
    f = _field(gas, left_unit, "constant")
    assert compute_A(f) == pytest.approx(0.7764854, abs=1e-6)


def test_eek_A_closed_form(gas, left_unit):
    # tau_- = 2, mu_- = kappa_- = 1 at theta_- = 1
    f = _field(gas, left_unit, "eek")
    expected = 1.4 * np.sqrt(1.4) * 1.2 / (1.0 * 2.0 + 1.4 * 1.0 + 0.16 * 1.0)
    assert compute_A(f) == pytest.approx(expected, rel=1e-12)
    assert compute_A(f) == pytest.approx(0.5583716, abs=1e-6)


def test_A_flips_sign_with_family(gas, left_unit):
    f3 = make_field(left_unit, 0.01, 3, gas, builtin_models("constant"))
    f1 = make_field(left_unit, 0.01, 1, gas, builtin_models("constant"))
    assert compute_A(f1) == pytest.approx(-compute_A(f3), rel=1e-12)


def test_critical_manifold_values():
    assert critical_manifold(0.0, 0.7764854) == 0.0
    assert critical_manifold(1.0, 0.7764854) == 0.0
    assert critical_manifold(0.5, 0.8) == pytest.approx(0.2)
    np.testing.assert_allclose(critical_manifold([0.25, 0.75], 1.0), [0.1875, 0.1875])


@pytest.mark.parametrize("model", ["constant", "eek"])
def test_critical_point_scan_finds_exactly_two(gas, left_unit, model):
    f = _field(gas, left_unit, model, eps=0.05)
    roots = critical_point_scan(f)
    assert len(roots) == 2
    assert roots[0] == pytest.approx(0.0, abs=1e-8)
    assert roots[1] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("model", ["constant", "power_law", "eek"])
def test_h_derivative_matrices_match_fd(gas, left_unit, model):
    rep = h_derivative_check(_field(gas, left_unit, model))
    assert rep.max_rel_err(1) <= 1e-5
    assert rep.max_rel_err(2) <= 1e-3
    assert rep.ok()


@pytest.mark.parametrize("model", ["constant", "power_law", "eek"])
def test_g_derivative_matrices_match_fd(gas, left_unit, model):
    rep = g_derivative_check(_field(gas, left_unit, model))
    assert rep.max_rel_err(1) <= 1e-5
    assert rep.max_rel_err(2) <= 1e-3
    assert rep.ok()


def test_base_matrix_closed_forms_constant(gas, left_unit):
    # unit left state, constant unit coefficients: every entry is explicit
    f = _field(gas, left_unit, "constant")
    s = np.sqrt(1.4)
    np.testing.assert_allclose(
        base_h_theta_matrix(f), [[1.0, 0.0], [-2.5 * s, -1.0]], rtol=1e-12
    )
    np.testing.assert_allclose(
        base_h_matrix(f), [[0.4, 2.0 * s, 1.0, 0.0], [-s, -1.0, 0.0, 0.0]], rtol=1e-12
    )
    np.testing.assert_allclose(
        base_g_matrix(f),
        [[-0.4, -2.0 * s, -1.0, 0.0], [0.0, 2.4 / 0.4, s / 0.4, 0.0]],
        rtol=1e-12,
    )
    second = base_h_second(f)
    sp0 = -2.4 * s / 4.0
    np.testing.assert_allclose(
        second,
        [
            [2.0, -1.0, 0.0, 2.0 * s * sp0, 0.0, 0.0],
            [1.4 * s, 0.0, 0.0, -sp0, -2.5 * sp0, 0.0],
        ],
        rtol=1e-12,
    )


def test_g_second_block_explicit_form(gas, left_unit):
    # [[ -2 gamma p/(R v), (gamma+1) sigma_*^2/(2R) ],
    #  [ (gamma+1) sigma_* gamma p/((gamma-1) kappa), -(gamma+1) sigma_* gamma p/(2 (gamma-1) kappa) ]]
    f = _field(gas, left_unit, "constant")
    s = np.sqrt(1.4)
    expected = np.array(
        [
            [-2.8, 2.4 * 1.4 / 2.0],
            [2.4 * s * 1.4 / 0.4, -2.4 * s * 1.4 / 0.8],
        ]
    )
    np.testing.assert_allclose(base_g_second_block(f), expected, rtol=1e-12)


def test_slow_fast_transform_rejects_1shocks(gas, left_unit, profile_db):
    from bnsf_shock import reflect

    prof, _ = profile_db[("constant", 0.05)]
    with pytest.raises(ValueError):
        to_slow_fast(reflect(prof))


def test_slow_fast_endpoints(profile_db):
    prof, _ = profile_db[("constant", 0.05)]
    path = to_slow_fast(prof)
    assert path.w0[0] == pytest.approx(0.0, abs=1e-6)
    assert path.w0[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(path.w0) > 0)
