"""Acceptance suite: one test and one printed pass/fail line per criterion.

Each criterion is checked at its stated tolerance; the summary lines are
echoed after the pytest run (see conftest).
"""

import time

import numpy as np
import pytest

from bnsf_shock import (
    PhaseField,
    ShootOptions,
    State,
    builtin_models,
    check_lax,
    compute_A,
    critical_point_scan,
    end_state_eigenstructure,
    g_derivative_check,
    h_derivative_check,
    make_field,
    make_shock,
    normalize_phase,
    reflect,
    rh_residual,
    shoot,
)
from bnsf_shock.profile_ode import rhs_many
from conftest import ACCEPTANCE_LINES, EPS_GRID, MODELS
from tests_support import eps_halving_ratios

FITTED_KEYS = ("C_tail", "C_ratio_u", "C_ratio_th", "C_second", "C_deriv", "C_jac")


def _record(number, title, ok):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}")
    assert ok, f"criterion {number} ({title}) failed"


def test_criterion_1_hugoniot_suite(gas):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    ok = True
    for _ in range(100):
        left = State(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0))
        family = int(rng.choice([1, 3]))
        eps = rng.uniform(0.001, 0.04) * left.v
        shock = make_shock(left, eps, family, gas)
        scale = max(1.0, abs(shock.sigma_eps)) ** 2 * max(left.v, left.theta, abs(left.u), 1.0)
        res = rh_residual(shock.left, shock.right, shock.sigma_eps, gas)
        ok &= bool(np.max(np.abs(res)) <= 1e-10 * scale)
        ok &= check_lax(shock.left, shock.right) == family
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    _record(1, "jump relations and entropy signs, 100 random shocks", ok)


def test_criterion_2_derivative_matrix_suite(gas, left_unit):
    t0 = time.perf_counter()
    ok = True
    for model, kwargs in (("constant", {}), ("power_law", {"beta": 0.5}), ("eek", {})):
        field = make_field(left_unit, 0.01, 3, gas, builtin_models(model, **kwargs))
        rep_h = h_derivative_check(field)
        rep_g = g_derivative_check(field)
        ok &= rep_h.max_rel_err(1) <= 1e-5 and rep_h.max_rel_err(2) <= 1e-3
        ok &= rep_g.max_rel_err(1) <= 1e-5 and rep_g.max_rel_err(2) <= 1e-3
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 5.0
    _record(2, "closed-form derivative matrices vs finite differences", ok)


def test_criterion_3_eigenstructure_suite(gas, left_unit):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    ok = True
    for _ in range(100):
        left = State(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0))
        eps = rng.uniform(0.001, 0.04) * left.v
        model = MODELS[int(rng.integers(2))]
        eig = end_state_eigenstructure(make_field(left, eps, 3, gas, builtin_models(model)))
        ok &= eig.det > 0 and eig.trace < 0
        ok &= eig.eigenvalues[0].real > 0
        ok &= eig.eigenvalues[1].real < 0 and eig.eigenvalues[2].real < 0
    eig = end_state_eigenstructure(make_field(left_unit, 0.01, 3, gas, builtin_models("constant")))
    ok &= abs(eig.det - 0.0488139) <= 1e-6
    ok &= abs(eig.trace - (-5.2928082)) <= 1e-6 * max(1.0, 5.2928082)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    _record(3, "end-state eigenstructure signature, 100 random draws", ok)


def test_criterion_4_profile_construction(profile_db):
    ok = True
    for (model, eps), (prof, dt) in profile_db.items():
        shock = prof.shock
        ok &= np.linalg.norm(prof.states[0] - shock.left.as_array()) <= 1e-8 * eps
        ok &= np.linalg.norm(prof.states[-1] - shock.right.as_array()) <= 1e-8 * eps
        ok &= bool(np.all(np.diff(prof.v) > 0))
        ok &= bool(np.all(np.diff(prof.u) < 0))
        ok &= bool(np.all(np.diff(prof.theta) < 0))
        ok &= bool(np.all(prof.d1[:, 0] > 0))
        ok &= bool(np.all(prof.d1[:, 1] < 0))
        ok &= bool(np.all(prof.d1[:, 2] < 0))
        ok &= dt < 2.0
    _record(4, "profile construction, 2 models x 4 amplitudes", ok)


def test_criterion_5_estimate_suite(report_db):
    ok = True
    for rep in report_db.values():
        for key in FITTED_KEYS:
            ok &= bool(np.isfinite(getattr(rep, key)))
    for model in MODELS:
        ratios = eps_halving_ratios(report_db, model, FITTED_KEYS)
        ok &= max(ratios.values()) <= 1.5
    _record(5, "fitted estimate constants finite and eps-uniform", ok)


def test_criterion_6_tail_rates(report_db):
    ok = True
    for model in MODELS:
        rep = report_db[(model, 0.0125)]
        expected = rep.decay_rate_expected
        ok &= abs(rep.decay_rate_left - expected) <= 0.1 * expected
        ok &= abs(rep.decay_rate_right - expected) <= 0.1 * expected
    rep = report_db[("constant", 0.0125)]
    ok &= abs(rep.decay_rate_expected - 0.7764854 * 0.0125) <= 1e-6
    _record(6, "tail decay rates within 10% of the logistic law", ok)


def test_criterion_7_critical_manifold(gas, left_unit, report_db):
    ok = True
    for model in MODELS:
        vals = [report_db[(model, eps)].C_manifold for eps in EPS_GRID]
        ok &= all(np.isfinite(vals))
        ok &= all(b / a <= 1.5 for a, b in zip(vals, vals[1:]))
        roots = critical_point_scan(make_field(left_unit, 0.05, 3, gas, builtin_models(model)))
        ok &= len(roots) == 2
        ok &= abs(roots[0]) <= 1e-8 and abs(roots[1] - 1.0) <= 1e-8
    _record(7, "critical-manifold proximity and exactly two critical points", ok)


def test_criterion_8_reflection_symmetry(profile_db, gas):
    ok = True
    for (model, eps), (prof, _) in profile_db.items():
        refl = reflect(prof)
        field1 = PhaseField(refl.shock, gas, builtin_models(model))
        res = refl.d1 - rhs_many(refl.states, field1)
        ok &= bool(np.max(np.abs(res)) <= 1e-12)
        ok &= bool(np.all(refl.d1[:, 0] < 0))
        ok &= bool(np.all(refl.d1[:, 1] < 0))
        ok &= bool(np.all(refl.d1[:, 2] > 0))
        back = reflect(refl)
        ok &= bool(np.max(np.abs(back.states - prof.states)) <= 1e-12)
        ok &= bool(np.max(np.abs(back.xi - prof.xi)) <= 1e-12)
    _record(8, "reflection symmetry and involution", ok)


def test_criterion_9_translation_uniqueness(gas, left_unit):
    field = make_field(left_unit, 0.05, 3, gas, builtin_models("constant"))
    p1 = normalize_phase(shoot(field, ShootOptions(launch_factor=1e-6)))
    p2 = normalize_phase(shoot(field, ShootOptions(launch_factor=1e-7)))
    xq = np.linspace(-120.0, 120.0, 1001)
    diff = float(np.max(np.abs(p1.interp(xq) - p2.interp(xq))))
    _record(9, "launch-offset independence after phase normalization", diff <= 1e-7)
