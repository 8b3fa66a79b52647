"""Quantitative estimate checks on computed profiles and eps-uniformity sweeps.

Each asymptotic inequality has an existential constant; the testable
surrogate is the fitted constant (supremum of the corresponding ratio over
samples) and its stability under eps-halving.  Fit windows exclude the
outermost decade of each tail, where the launch offset and end tolerance
dominate.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .gas import GasConstants, State, TransportModel
from .profile_ode import PhaseField, make_field
from .reduction import critical_manifold, to_slow_fast
from .shooting import Profile, ShootOptions, normalize_phase, shoot

FIT_INNER = 1e-7  # tail fit window, relative to eps
FIT_OUTER = 0.1
MIN_FIT_SAMPLES = 5
RATIO_LIMIT = 1.5  # eps-halving stability threshold


class FitWindowError(RuntimeError):
    """Raised when a tail fit window holds too few samples (under-resolved)."""


@dataclass
class EstimateReport:
    """Fitted constants and pass/fail flags for the profile estimates."""

    C_tail: float
    C_ratio_u: float
    C_ratio_th: float
    C_second: float
    decay_rate_left: float
    decay_rate_right: float
    decay_rate_expected: float
    C_jac: float
    sign_ok: bool
    sigma_gap: float
    C_manifold: float
    C_deriv: float
    derivdecay_ok: bool
    eps: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def fitted_constants(self) -> dict:
        return {
            k: getattr(self, k)
            for k in ("C_tail", "C_ratio_u", "C_ratio_th", "C_second", "C_jac", "C_manifold")
        }


def _fit_decay(xi, amp, eps):
    mask = (amp >= FIT_INNER * eps) & (amp <= FIT_OUTER * eps)
    if mask.sum() < MIN_FIT_SAMPLES:
        raise FitWindowError(
            f"decay fit window holds {int(mask.sum())} samples; tail under-resolved"
        )
    slope = np.polyfit(xi[mask], np.log(amp[mask]), 1)[0]
    return slope


def verify_profile(profile: Profile, A: float, gas: GasConstants | None = None) -> EstimateReport:
    """Evaluate every profile estimate and return the fitted constants.

    The profile must be phase-normalized with both tails resolved; ``gas``
    is read from solver metadata when omitted.
    """
    if gas is None:
        gas = profile.gas()
    shock = profile.shock
    if shock.family != 3:
        raise ValueError("verify_profile expects a 3-shock profile; reflect 1-shocks first")
    eps = shock.eps
    left, right = shock.left, shock.right
    sigma_star = shock.sigma_star
    p_minus = gas.R * left.theta / left.v

    xi = profile.xi
    v, dv = profile.v, profile.d1[:, 0]
    du, dth = profile.d1[:, 1], profile.d1[:, 2]

    y = (v - left.v) / eps
    interior = (y >= FIT_INNER) & (1.0 - y >= FIT_INNER)
    if interior.sum() < MIN_FIT_SAMPLES:
        raise FitWindowError("no interior samples inside the fit window; tail under-resolved")

    sign_ok = bool(np.all(dv > 0) and np.all(du < 0) and np.all(dth < 0))

    quad = (right.v - v) * (v - left.v)
    C_tail = float(np.max(np.abs(dv - A * quad)[interior] / (eps * quad[interior])))

    absdv = np.abs(dv)
    C_ratio_u = float(np.max(np.abs(du + sigma_star * dv)[interior] / (eps * absdv[interior])))
    C_ratio_th = float(
        np.max(
            np.abs(dth + (gas.gamma - 1.0) * p_minus / gas.R * dv)[interior]
            / (eps * absdv[interior])
        )
    )
    d1n = np.linalg.norm(profile.d1, axis=1)
    d2n = np.linalg.norm(profile.d2, axis=1)
    C_second = float(np.max(d2n[interior] / (eps * d1n[interior])))

    dy = dv / eps
    jac_ratio = dy[interior] / (y[interior] * (1.0 - y[interior]))
    C_jac = float(np.max(np.abs(jac_ratio - A * eps)) / eps**2)

    rate_left = _fit_decay(xi, v - left.v, eps)
    rate_right = -_fit_decay(xi, right.v - v, eps)
    if rate_left <= 0 or rate_right <= 0:
        raise FitWindowError(
            f"nonpositive fitted decay rate ({rate_left}, {rate_right}); tail under-resolved"
        )

    # pointwise exponential bound on v' with the fitted constants, 1.2x slack
    rate = min(rate_left, rate_right)
    envelope = eps**2 * np.exp(-rate * np.abs(xi))
    C_deriv = float(np.max(absdv[interior] / envelope[interior]))
    derivdecay_ok = bool(np.all(absdv <= 1.2 * C_deriv * envelope))

    path = to_slow_fast(profile, shock)
    C_manifold = float(
        np.max(np.abs(path.w1 - critical_manifold(path.w0, A))[interior]) / eps
    )

    return EstimateReport(
        C_tail=C_tail,
        C_ratio_u=C_ratio_u,
        C_ratio_th=C_ratio_th,
        C_second=C_second,
        decay_rate_left=float(rate_left),
        decay_rate_right=float(rate_right),
        decay_rate_expected=float(A * eps),
        C_jac=C_jac,
        sign_ok=sign_ok,
        sigma_gap=float(abs(shock.sigma_eps - sigma_star) / eps),
        C_manifold=C_manifold,
        C_deriv=C_deriv,
        derivdecay_ok=derivdecay_ok,
        eps=eps,
    )


@dataclass
class FieldTemplate:
    """Everything but the amplitude: builds a PhaseField per eps."""

    left: State
    family: int
    gas: GasConstants
    coeffs: TransportModel

    def field(self, eps: float) -> PhaseField:
        return make_field(self.left, eps, self.family, self.gas, self.coeffs)


@dataclass
class SweepReport:
    """Fitted constants across an eps sweep and their consecutive ratios."""

    eps_list: list
    reports: list
    ratios: dict = dc_field(default_factory=dict)
    max_ratio: float = 0.0
    uniform: bool = True

    def to_dict(self) -> dict:
        return {
            "eps_list": list(self.eps_list),
            "reports": [r.to_dict() for r in self.reports],
            "ratios": self.ratios,
            "max_ratio": self.max_ratio,
            "uniform": self.uniform,
        }


def _run_one(template, eps, opts):
    try:
        profile = normalize_phase(shoot(template.field(eps), opts))
        A = profile.shock.A
        return verify_profile(profile, A, template.gas)
    except Exception as exc:
        raise RuntimeError(f"sweep failed at eps={eps}: {exc}") from exc


def sweep(
    template: FieldTemplate, eps_list, opts: ShootOptions | None = None
) -> SweepReport:
    """Shoot and verify one profile per eps; assess eps-uniformity.

    ``eps_list`` must be descending.  Uniformity passes when for every
    fitted constant each consecutive (smaller eps over larger eps) ratio
    stays at or below 1.5.  Parallelism is capped by BNSF_SHOCK_THREADS.
    """
    eps_list = list(eps_list)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly descending")

    workers = int(os.environ.get("BNSF_SHOCK_THREADS", "1"))
    if workers > 1 and len(eps_list) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda e: _run_one(template, e, opts), eps_list))
    else:
        reports = [_run_one(template, e, opts) for e in eps_list]

    ratios = {}
    max_ratio = 0.0
    for key in reports[0].fitted_constants():
        vals = [r.fitted_constants()[key] for r in reports]
        rr = [b / a for a, b in zip(vals, vals[1:])]
        ratios[key] = rr
        if rr:
            max_ratio = max(max_ratio, max(rr))
    uniform = all(r <= RATIO_LIMIT for rs in ratios.values() for r in rs)
    return SweepReport(
        eps_list=eps_list, reports=reports, ratios=ratios,
        max_ratio=float(max_ratio), uniform=bool(uniform),
    )
