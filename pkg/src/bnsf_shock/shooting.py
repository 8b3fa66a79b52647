"""Heteroclinic profile construction by shooting from the unstable direction.

The orbit is launched a small offset along the unstable eigenvector of the
left end state and integrated with an adaptive embedded Runge-Kutta 5(4)
pair until it lands within tolerance of the right end state.  The left
tail below the launch offset is resolved through the linearized flow,
whose error there is quadratically small in the offset.  Samples are
distributed with equal arc length in v through the interior plus
log-spaced tail refinement, so decay-rate fits have support.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .gas import GasConstants, State
from .hugoniot import ShockData
from .profile_ode import (
    PhaseField,
    end_state_eigenstructure,
    rhs_jacobian,
    rhs_many,
    second_derivative_many,
)
from .reduction import compute_A

CSV_HEADER = "xi,v,u,theta,dv,du,dtheta,d2v,d2u,d2theta"


@dataclass
class ShootOptions:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    tol_end_factor: float = 1e-8  # endpoint tolerance = factor * eps
    tail_factor: float = 1e-8  # left-tail resolution = factor * eps
    xi_cap_factor: float = 40.0  # cap = factor / (|A| * eps)
    launch_factor: float = 1e-6  # offset = factor * eps * v_minus
    n_samples: int = 2000
    n_tail: int = 250
    flip_ray: bool = False  # launch along the other unstable branch (for testing)


@dataclass
class Profile:
    """Sampled heteroclinic orbit with first and second derivatives.

    ``states`` is (N, 3) with columns (v, u, theta); ``d1`` holds the field
    values and ``d2`` the chain-rule second derivatives at each sample.
    """

    xi: np.ndarray
    states: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    shock: ShockData
    solver_meta: dict = dc_field(default_factory=dict)
    _ivp_dense: object = dc_field(default=None, repr=False, compare=False)

    @property
    def v(self):
        return self.states[:, 0]

    @property
    def u(self):
        return self.states[:, 1]

    @property
    def theta(self):
        return self.states[:, 2]

    def gas(self) -> GasConstants:
        meta = self.solver_meta.get("gas")
        if meta is None:
            raise ValueError("profile carries no gas metadata; pass gas explicitly")
        return GasConstants(R=meta["R"], gamma=meta["gamma"])

    def interp(self, xq) -> np.ndarray:
        """Cubic-Hermite interpolation of the states at query points."""
        return _hermite(self.xi, self.states, self.d1, np.asarray(xq, dtype=float))

    def interp_component(self, xq, col: int) -> np.ndarray:
        return _hermite(self.xi, self.states[:, [col]], self.d1[:, [col]], np.asarray(xq, float))[
            ..., 0
        ]

    def save_csv(self, path):
        rows = np.column_stack([self.xi, self.states, self.d1, self.d2])
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in rows:
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")

    @staticmethod
    def load_csv(path, shock: ShockData, solver_meta: dict | None = None) -> "Profile":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 10:
            raise ValueError(f"profile CSV must have 10 columns, got {data.shape[1]}")
        return Profile(
            xi=data[:, 0],
            states=data[:, 1:4],
            d1=data[:, 4:7],
            d2=data[:, 7:10],
            shock=shock,
            solver_meta=dict(solver_meta or {}),
        )

    def save_shock_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.shock.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _hermite(x, y, dy, xq):
    """Vectorized cubic Hermite evaluation on a strictly increasing grid."""
    xq = np.atleast_1d(xq)
    idx = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
    x0, x1 = x[idx], x[idx + 1]
    h = (x1 - x0)[:, None]
    t = ((xq - x0) / (x1 - x0))[:, None]
    y0, y1 = y[idx], y[idx + 1]
    m0, m1 = dy[idx] * h, dy[idx + 1] * h
    t2, t3 = t * t, t * t * t
    out = (
        (2 * t3 - 3 * t2 + 1) * y0
        + (t3 - 2 * t2 + t) * m0
        + (-2 * t3 + 3 * t2) * y1
        + (t3 - t2) * m1
    )
    return out


def _mirror_shock(shock: ShockData, gas: GasConstants) -> ShockData:
    """The reflected shock: end states swapped, velocities and speeds negated."""
    new_family = 1 if shock.family == 3 else 3
    s_star_mag = math.sqrt(gas.gamma * gas.R * shock.right.theta) / shock.right.v
    return ShockData(
        left=State(shock.right.v, -shock.right.u, shock.right.theta),
        right=State(shock.left.v, -shock.left.u, shock.left.theta),
        eps=shock.eps,
        sigma_eps=-shock.sigma_eps,
        sigma_star=s_star_mag if new_family == 3 else -s_star_mag,
        family=new_family,
        A=None,
    )


def _right_slow_direction(field: PhaseField, dirv: float):
    """Slow stable eigenpair of the Jacobian at the right end state.

    The right end state is a stable node and generic orbits land tangent
    to the slowest eigendirection, whose eigenvalue is the one closest to
    zero.  The eigenvector is oriented so the tail approaches from the
    interior of the shock layer.
    """
    J = rhs_jacobian(field.shock.right, field)
    w, V = np.linalg.eig(J)
    if np.any(w.real >= 0):
        raise RuntimeError(f"right end state is not attracting: eigenvalues {w}")
    k = int(np.argmax(w.real))
    if abs(w[k].imag) > 1e-12 * abs(w[k].real):
        raise RuntimeError(f"slow eigenvalue at the right end state is not real: {w}")
    lam_s = float(w[k].real)
    e_s = V[:, k].real
    e_s = e_s / np.linalg.norm(e_s)
    if dirv * e_s[0] > 0:
        e_s = -e_s
    return lam_s, e_s


def shoot(field: PhaseField, opts: ShootOptions | None = None) -> Profile:
    """Construct the heteroclinic profile for the field's shock.

    Raises RuntimeError when the orbit fails to approach the right state
    within the xi cap (reporting the closest approach), when it exits the
    monotone octant (wrong unstable branch), or on a step-count blowup.
    """
    opts = opts or ShootOptions()
    shock, gas = field.shock, field.gas
    eps = shock.eps
    if eps == 0:
        raise ValueError("cannot shoot a zero-amplitude shock (degenerate eigenstructure)")

    if shock.family == 1:
        # the left end state of a 1-shock is fully unstable; construct the
        # mirrored 3-shock (whose left state has a one-dimensional unstable
        # manifold) and reflect the result back
        mirror = PhaseField(shock=_mirror_shock(shock, gas), gas=gas, coeffs=field.coeffs)
        prof = reflect(shoot(mirror, opts), gas)
        return replace(
            prof, shock=replace(shock, A=compute_A(field)), solver_meta=prof.solver_meta
        )

    eig = end_state_eigenstructure(field)
    lam_u = eig.unstable_eigenvalue
    e_u = eig.unstable_direction.copy()
    if opts.flip_ray:
        e_u = -e_u

    left = shock.left.as_array()
    right = shock.right.as_array()
    delta = opts.launch_factor * eps * shock.left.v
    x0 = left + delta * e_u
    tol_end = opts.tol_end_factor * eps
    A = compute_A(field)
    xi_cap = opts.xi_cap_factor / (abs(A) * eps)
    dirv = 1.0 if shock.family == 3 else -1.0

    # lean scalar closure for the integrator; the vectorized rhs_many costs
    # about 10x more per call in wrapper overhead
    sigma = shock.sigma_eps
    vl, ul, thl = shock.left.v, shock.left.u, shock.left.theta
    R = gas.R
    cg = gas.R / (gas.gamma - 1.0)
    p_minus = R * thl / vl
    tau_fn, mu_fn, kappa_fn = field.coeffs._tau, field.coeffs._mu, field.coeffs._kappa

    def f(t, y):
        v, u, th = y
        if not (v > 0 and th > 0):
            raise RuntimeError(f"trajectory left the physical region at xi={t}: v={v}, theta={th}")
        dv_ = v - vl
        du_ = u - ul
        dth_ = th - thl
        return np.array(
            [
                v / tau_fn(th)[0] * (-sigma * dv_ - du_),
                v / mu_fn(th)[0] * (-sigma * du_ + (R * th / v - p_minus)),
                v / kappa_fn(th)[0] * (-sigma * (cg * dth_ - 0.5 * du_ * du_) + p_minus * du_),
            ]
        )

    def ev_close(t, y):
        return float(np.linalg.norm(y - right)) - tol_end

    ev_close.terminal = True
    ev_close.direction = -1

    def ev_exit(t, y):
        # fires when v moves the wrong way past the launch offset scale
        return dirv * (y[0] - shock.left.v) + 10.0 * delta

    ev_exit.terminal = True
    ev_exit.direction = -1

    rtol, atol = opts.rel_tol, opts.abs_tol
    sol = solve_ivp(
        f, (0.0, xi_cap), x0, method="RK45", rtol=rtol, atol=atol,
        dense_output=True, events=[ev_close, ev_exit],
    )
    if sol.status == -1:
        # rejection storm or step failure: retry once at half tolerance
        sol = solve_ivp(
            f, (0.0, xi_cap), x0, method="RK45", rtol=rtol / 2, atol=atol / 2,
            dense_output=True, events=[ev_close, ev_exit],
        )
    if sol.status == -1:
        raise RuntimeError(f"integration failed: {sol.message}")
    if len(sol.t_events[1]):
        raise RuntimeError(
            "trajectory left the monotone octant immediately; "
            "wrong branch of the unstable manifold"
        )
    if not len(sol.t_events[0]):
        dists = np.linalg.norm(sol.y - right[:, None], axis=0)
        raise RuntimeError(
            f"failed to approach the right state within xi cap {xi_cap:.3g}; "
            f"closest approach {dists.min():.3e} (tolerance {tol_end:.3e})"
        )
    xi_end = float(sol.t_events[0][0])

    # slow stable eigenstructure at the right end state, for the right tail
    lam_s, e_s = _right_slow_direction(field, dirv)

    # the numerical samples stop at the switch amplitude; below it the
    # state error of the integrator would swamp the true derivatives, so
    # both tails are continued through the linearized flow instead
    amp_switch = 1e-4 * eps
    fine_all = np.linspace(0.0, xi_end, max(20000, 4 * opts.n_samples) + 1)
    vf_all = dirv * sol.sol(fine_all)[0]
    v_minus_d = dirv * shock.left.v
    v_plus_d = dirv * shock.right.v
    cut = np.searchsorted(vf_all, v_plus_d - amp_switch)
    fine, vf = fine_all[: cut + 1], vf_all[: cut + 1]

    dv = np.diff(vf)
    if np.any(dv < -(10.0 * (opts.abs_tol + opts.rel_tol) + 1e-12 * eps)):
        raise RuntimeError("monotonicity violation in the integrated v samples")
    keep = np.concatenate([[True], dv > 0])
    vf_mono, fine_mono = vf[keep], fine[keep]

    v0_d = vf_mono[0]
    v_end_d = vf_mono[-1]

    targets = [np.linspace(v0_d, v_end_d, opts.n_samples)]
    amp_left = max(v0_d - v_minus_d, 1e-300)
    if 0.1 * eps > amp_left:
        targets.append(v_minus_d + np.geomspace(amp_left, 0.1 * eps, opts.n_tail))
    targets.append(v_plus_d - np.geomspace(amp_switch, 0.1 * eps, opts.n_tail))
    tv = np.clip(np.unique(np.concatenate(targets)), v0_d, v_end_d)
    xi_int = np.unique(np.interp(tv, vf_mono, fine_mono))
    states_int = sol.sol(xi_int).T

    # --- analytic left tail below the launch offset (linearized flow)
    s_min = 0.5 * opts.tail_factor * eps
    s_vals = np.geomspace(s_min, delta, opts.n_tail, endpoint=False)
    xi_tail = np.log(s_vals / delta) / lam_u
    states_tail = left[None, :] + s_vals[:, None] * e_u[None, :]

    # --- analytic right tail below the switch amplitude
    xi_sw = float(np.interp(v_end_d, vf_mono, fine_mono))
    s_ref = (v_plus_d - v_end_d) / abs(e_s[0])
    s_vals_r = np.geomspace(s_ref, s_min, opts.n_tail)[1:]
    xi_tail_r = xi_sw + np.log(s_vals_r / s_ref) / lam_s
    states_tail_r = right[None, :] + s_vals_r[:, None] * e_s[None, :]

    xi = np.concatenate([xi_tail, xi_int, xi_tail_r])
    states = np.concatenate([states_tail, states_int, states_tail_r], axis=0)
    order = np.argsort(xi)
    xi, states = xi[order], states[order]
    keep = np.concatenate([[True], np.diff(xi) > 0])
    xi, states = xi[keep], states[keep]

    if np.any(dirv * np.diff(states[:, 0]) <= 0):
        raise RuntimeError("assembled profile is not strictly monotone in v")

    d1 = rhs_many(states, field)
    d2 = second_derivative_many(states, field)

    meta = {
        "rel_tol": rtol,
        "abs_tol": atol,
        "tol_end": tol_end,
        "delta": delta,
        "xi_cap": xi_cap,
        "xi_end": xi_end,
        "n_steps": int(len(sol.t)),
        "lambda_unstable": lam_u,
        "lambda_slow": lam_s,
        "A": A,
        "gas": {"R": gas.R, "gamma": gas.gamma},
        "coeffs": field.coeffs.name,
    }
    return Profile(
        xi=xi, states=states, d1=d1, d2=d2,
        shock=replace(shock, A=A), solver_meta=meta, _ivp_dense=sol.sol,
    )


def normalize_phase(profile: Profile) -> Profile:
    """Shift the grid so that v(0) = (v_- + v_+)/2.

    Monotone root finding on the Hermite dense output; raises ValueError
    when the midpoint value is not bracketed by the samples.
    """
    shock = profile.shock
    v_mid = 0.5 * (shock.left.v + shock.right.v)
    v = profile.v
    lo, hi = min(v[0], v[-1]), max(v[0], v[-1])
    if not (lo <= v_mid <= hi):
        raise ValueError(f"midpoint v={v_mid} not bracketed by samples [{lo}, {hi}]")

    def g(x):
        return float(profile.interp_component(np.array([x]), 0)[0]) - v_mid

    xi_star = brentq(g, profile.xi[0], profile.xi[-1], xtol=1e-14, rtol=8.9e-16)

    dense = profile._ivp_dense
    if dense is not None and abs(xi_star) > 0:
        shifted = _ShiftedDense(dense, xi_star)
    else:
        shifted = dense
    meta = dict(profile.solver_meta)
    meta["phase_shift"] = meta.get("phase_shift", 0.0) + xi_star
    return Profile(
        xi=profile.xi - xi_star,
        states=profile.states,
        d1=profile.d1,
        d2=profile.d2,
        shock=profile.shock,
        solver_meta=meta,
        _ivp_dense=shifted,
    )


class _ShiftedDense:
    def __init__(self, dense, shift):
        self._dense = dense
        self._shift = shift

    def __call__(self, x):
        return self._dense(np.asarray(x) + self._shift)


def reflect(profile: Profile, gas: GasConstants | None = None) -> Profile:
    """Mirror a profile: xi -> -xi, u -> -u, sigma -> -sigma.

    Maps a 3-shock profile to the corresponding 1-shock profile (and back);
    the reflected left end state is the original right state with negated
    velocity.  ``gas`` is taken from solver metadata when not given.
    """
    if gas is None:
        gas = profile.gas()
    new_shock = _mirror_shock(profile.shock, gas)
    rev = slice(None, None, -1)
    states = profile.states[rev].copy()
    states[:, 1] *= -1.0
    d1 = profile.d1[rev].copy()
    d1[:, 0] *= -1.0
    d1[:, 2] *= -1.0
    d2 = profile.d2[rev].copy()
    d2[:, 1] *= -1.0
    meta = dict(profile.solver_meta)
    meta["reflected"] = not meta.get("reflected", False)
    return Profile(
        xi=-profile.xi[rev],
        states=states,
        d1=d1,
        d2=d2,
        shock=new_shock,
        solver_meta=meta,
    )
