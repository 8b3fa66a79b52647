"""Two-variable reduction of the profile ODE and its slow-fast structure.

The integrated shock system is collapsed onto (h1, h2)(v, theta, v', v'',
theta', eps) = 0; the temperature pair (theta, theta') is recovered from
(v, v', v'', eps) by a damped Newton solve, realizing the implicit
functions (g1, g2).  Closed-form derivative matrices at the base point
(v_-, 0, 0, 0) characterize the critical manifold w1 = A*w0*(1 - w0) in
the slow-fast coordinates w0 = (v - v_-)/eps, w1 = v'/eps^2, w2 = v''/eps^2,
z = eps*xi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .gas import GasConstants, State, TransportModel
from .profile_ode import PhaseField


@dataclass(frozen=True)
class ReducedPoint:
    """Arguments (v, v', v'', eps) of the implicit temperature solve."""

    v: float
    vp: float
    vpp: float
    eps: float


@dataclass
class SlowFastPath:
    """Profile samples in slow-fast coordinates (arrays, one entry per sample)."""

    z: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    w2: np.ndarray


def sigma_of_eps(field: PhaseField, eps: float) -> float:
    """Shock speed as a smooth function of the amplitude, signed by family."""
    gas, left = field.gas, field.shock.left
    p_minus = gas.R * left.theta / left.v
    delta = eps if field.shock.family == 3 else -eps
    denom = left.v + 0.5 * (gas.gamma + 1.0) * delta
    if denom <= 0:
        raise ValueError(f"shock speed denominator nonpositive at eps={eps}")
    mag = math.sqrt(gas.gamma * p_minus / denom)
    return mag if field.shock.family == 3 else -mag


def _sigma_prime0(field: PhaseField) -> float:
    """d sigma_eps / d eps at eps = 0."""
    gas, left = field.gas, field.shock.left
    s_star = sigma_of_eps(field, 0.0)
    sign = 1.0 if field.shock.family == 3 else -1.0
    return -sign * (gas.gamma + 1.0) * s_star / (4.0 * left.v)


def eval_h(p: ReducedPoint, theta: float, thetap: float, field: PhaseField) -> np.ndarray:
    """The reduced pair (h1, h2) at (v, theta, v', v'', theta', eps)."""
    gas, left = field.gas, field.shock.left
    if not (theta > 0 and p.v > 0):
        raise ValueError(f"eval_h requires v, theta > 0; got v={p.v}, theta={theta}")
    sigma = sigma_of_eps(field, p.eps)
    R, gamma = gas.R, gas.gamma
    p_minus = R * left.theta / left.v

    tau, dtau, _ = field.coeffs.tau(theta)
    mu = field.coeffs.mu(theta)[0]
    kappa = field.coeffs.kappa(theta)[0]

    v, vp, vpp = p.v, p.vp, p.vpp
    G = sigma * (v - left.v) + tau * vp / v
    h1 = (
        sigma * G
        + (R * theta / v - p_minus)
        + mu / v * (sigma * vp + dtau * thetap * vp / v + tau * (vpp * v - vp**2) / v**2)
    )
    h2 = (
        -sigma * R / (gamma - 1.0) * (theta - left.theta)
        + 0.5 * sigma * G**2
        - p_minus * G
        - kappa * thetap / v
    )
    return np.array([h1, h2])


def h_theta_jacobian(p: ReducedPoint, theta: float, thetap: float, field: PhaseField) -> np.ndarray:
    """Analytic 2x2 Jacobian of (h1, h2) with respect to (theta, theta')."""
    gas, left = field.gas, field.shock.left
    sigma = sigma_of_eps(field, p.eps)
    R, gamma = gas.R, gas.gamma
    p_minus = R * left.theta / left.v

    tau, dtau, d2tau = field.coeffs.tau(theta)
    mu, dmu, _ = field.coeffs.mu(theta)
    kappa, dkappa, _ = field.coeffs.kappa(theta)

    v, vp, vpp = p.v, p.vp, p.vpp
    G = sigma * (v - left.v) + tau * vp / v
    visc = sigma * vp + dtau * thetap * vp / v + tau * (vpp * v - vp**2) / v**2

    dh1_dth = (
        sigma * dtau * vp / v
        + R / v
        + dmu / v * visc
        + mu / v * (d2tau * thetap * vp / v + dtau * (vpp * v - vp**2) / v**2)
    )
    dh1_dthp = mu / v * (dtau * vp / v)
    dh2_dth = (
        -sigma * R / (gamma - 1.0)
        + (sigma * G - p_minus) * dtau * vp / v
        - dkappa * thetap / v
    )
    dh2_dthp = -kappa / v
    return np.array([[dh1_dth, dh1_dthp], [dh2_dth, dh2_dthp]])


def box_limit(field: PhaseField) -> float:
    """Working-box bound for the reduced arguments: max(2, 2|A|)."""
    return max(2.0, 2.0 * abs(compute_A(field)))


def solve_theta(
    p: ReducedPoint,
    field: PhaseField,
    tol: float = 1e-13,
    maxiter: int = 50,
) -> tuple[float, float]:
    """Recover (theta, theta') from (v, v', v'', eps) by damped Newton.

    Realizes the implicit functions (g1, g2) with residual below 1e-12.
    Raises RuntimeError on non-convergence (reporting the last residual)
    and ValueError when the point leaves the working box.
    """
    left = field.shock.left
    if abs(p.v - left.v) > 0.5 * left.v:
        raise ValueError(f"v={p.v} outside the working neighborhood of v_minus={left.v}")
    M = box_limit(field)
    if abs(p.vp) > M or abs(p.vpp) > M:
        raise ValueError(f"(v', v'')=({p.vp}, {p.vpp}) outside the working box |.| <= {M}")

    x = np.array([left.theta, 0.0])
    r = eval_h(p, x[0], x[1], field)
    rnorm = np.linalg.norm(r)
    for _ in range(maxiter):
        if rnorm <= tol:
            break
        J = h_theta_jacobian(p, x[0], x[1], field)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"singular temperature Jacobian at {p}") from exc
        # halve the step while the residual fails to decrease
        lam = 1.0
        for _ in range(5):
            x_new = x + lam * step
            if x_new[0] > 0:
                r_new = eval_h(p, x_new[0], x_new[1], field)
                if np.linalg.norm(r_new) < rnorm:
                    break
            lam *= 0.5
        else:
            x_new = x + lam * step
            r_new = eval_h(p, x_new[0], x_new[1], field)
        x, r = x_new, r_new
        rnorm = np.linalg.norm(r)
    if rnorm > 1e-12:
        raise RuntimeError(f"Newton failed to converge at {p}: residual {rnorm:.3e}")
    return float(x[0]), float(x[1])


# ---------------------------------------------------------------------------
# closed-form derivative matrices at the base point (v_-, 0, 0, 0)
# ---------------------------------------------------------------------------


def _base_quantities(field: PhaseField):
    gas, left = field.gas, field.shock.left
    p_minus = gas.R * left.theta / left.v
    s_star = sigma_of_eps(field, 0.0)
    tau = float(field.coeffs.tau(left.theta)[0])
    mu = float(field.coeffs.mu(left.theta)[0])
    kappa = float(field.coeffs.kappa(left.theta)[0])
    return gas, left, p_minus, s_star, tau, mu, kappa


def base_h_theta_matrix(field: PhaseField) -> np.ndarray:
    """d(h1, h2)/d(theta, theta') at the base point."""
    gas, left, p_minus, s_star, tau, mu, kappa = _base_quantities(field)
    R, gamma, v = gas.R, gas.gamma, left.v
    return np.array([[R / v, 0.0], [-s_star * R / (gamma - 1.0), -kappa / v]])


def base_h_matrix(field: PhaseField) -> np.ndarray:
    """d(h1, h2)/d(v, v', v'', eps) at the base point."""
    gas, left, p_minus, s_star, tau, mu, kappa = _base_quantities(field)
    gamma, v = gas.gamma, left.v
    return np.array(
        [
            [(gamma - 1.0) * p_minus / v, s_star * (tau + mu) / v, mu * tau / v**2, 0.0],
            [-s_star * p_minus, -p_minus * tau / v, 0.0, 0.0],
        ]
    )


def base_h_second(field: PhaseField) -> np.ndarray:
    """The twelve second derivatives of (h1, h2) at the base point.

    Columns: d2/dv2, d2/dv dtheta, d2/dtheta2, d2/deps dv, d2/deps dtheta,
    d2/deps2.
    """
    gas, left, p_minus, s_star, tau, mu, kappa = _base_quantities(field)
    R, gamma, v = gas.R, gas.gamma, left.v
    sp0 = _sigma_prime0(field)
    return np.array(
        [
            [2.0 * p_minus / v**2, -R / v**2, 0.0, 2.0 * s_star * sp0, 0.0, 0.0],
            [
                s_star * gamma * p_minus / v,
                0.0,
                0.0,
                -p_minus * sp0,
                -R / (gamma - 1.0) * sp0,
                0.0,
            ],
        ]
    )


def base_g_matrix(field: PhaseField) -> np.ndarray:
    """d(g1, g2)/d(v, v', v'', eps) at the base point."""
    gas, left, p_minus, s_star, tau, mu, kappa = _base_quantities(field)
    R, gamma, v = gas.R, gas.gamma, left.v
    return np.array(
        [
            [
                -(gamma - 1.0) * left.theta / v,
                -s_star * (tau + mu) / R,
                -mu * tau / (R * v),
                0.0,
            ],
            [
                0.0,
                p_minus * (tau + gamma * mu) / ((gamma - 1.0) * kappa),
                s_star * mu * tau / ((gamma - 1.0) * kappa),
                0.0,
            ],
        ]
    )


def base_g_second_block(field: PhaseField) -> np.ndarray:
    """The 2x2 block [[g1_vv, g1_veps], [g2_vv, g2_veps]] at the base point."""
    gas, left, p_minus, s_star, tau, mu, kappa = _base_quantities(field)
    v = left.v
    sp0 = _sigma_prime0(field)
    gamma = gas.gamma
    # reduced chain-rule right-hand side after eliminating dg1/dv
    M2 = np.array(
        [
            [2.0 * gamma * p_minus / v**2, 2.0 * s_star * sp0],
            [s_star * gamma * p_minus / v, 0.0],
        ]
    )
    return -np.linalg.solve(base_h_theta_matrix(field), M2)


def compute_A(field: PhaseField) -> float:
    """Tail-law constant of the logistic profile law, signed by family."""
    gas, left, p_minus, s_star, tau, mu, kappa = _base_quantities(field)
    R, gamma = gas.R, gas.gamma
    denom = R * tau + R * gamma * mu + (gamma - 1.0) ** 2 * kappa
    return R * gamma * s_star / denom * (gamma + 1.0) / 2.0


def critical_manifold(w0, A):
    """Graph of the critical manifold: w1 = A*w0*(1 - w0)."""
    w0 = np.asarray(w0, dtype=float)
    return (A * w0 * (1.0 - w0))[()]


def to_slow_fast(profile, shock=None) -> SlowFastPath:
    """Map a phase-normalized 3-shock profile to (z, w0, w1, w2) samples."""
    shock = shock if shock is not None else profile.shock
    if shock.family != 3:
        raise ValueError("slow-fast coordinates are defined for 3-shocks; reflect first")
    eps = shock.eps
    if eps == 0:
        raise ValueError("slow-fast transformation degenerates at eps=0")
    v_minus = shock.left.v
    return SlowFastPath(
        z=eps * profile.xi,
        w0=(profile.v - v_minus) / eps,
        w1=profile.d1[:, 0] / eps**2,
        w2=profile.d2[:, 0] / eps**2,
    )


def critical_point_scan(
    field: PhaseField,
    w0_range: tuple[float, float] = (-0.5, 1.5),
    n: int = 801,
    tol: float = 1e-10,
) -> list[float]:
    """Locate all critical points of the slow-fast system in a w0 window.

    Scans w0 -> g2(v_- + eps*w0, 0, 0, eps) for sign changes and refines
    each by bisection.  For admissible fields the result is exactly
    {0, 1}.
    """
    eps = field.shock.eps
    if eps == 0:
        raise ValueError("critical-point scan requires eps != 0")
    delta = eps if field.shock.family == 3 else -eps
    v_minus = field.shock.left.v

    def residual(w0):
        p = ReducedPoint(v_minus + delta * w0, 0.0, 0.0, eps)
        return solve_theta(p, field)[1]

    grid = np.linspace(w0_range[0], w0_range[1], n)
    vals = np.array([residual(w) for w in grid])

    roots = []
    for i in range(n - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0:
            for _ in range(200):
                m = 0.5 * (a + b)
                fm = residual(m)
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
                if b - a < tol:
                    break
            roots.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        roots.append(grid[-1])

    # merge roots produced by residual-level noise around a simple zero
    merged: list[float] = []
    for r in sorted(roots):
        if not merged or r - merged[-1] > 1e-6:
            merged.append(float(r))
    return merged


# ---------------------------------------------------------------------------
# finite-difference verification of the derivative matrices
# ---------------------------------------------------------------------------


@dataclass
class DerivativeReport:
    """Per-entry comparison of analytic derivative matrices against finite
    differences; ``entries`` rows carry matrix_name, entry, analytic, fd,
    rel_err, order."""

    entries: list = dc_field(default_factory=list)

    def add(self, matrix_name, entry, analytic, fd, order):
        rel_err = abs(fd - analytic) / max(abs(analytic), 1.0)
        self.entries.append(
            {
                "matrix_name": matrix_name,
                "entry": entry,
                "analytic": float(analytic),
                "fd": float(fd),
                "rel_err": float(rel_err),
                "order": order,
            }
        )

    def max_rel_err(self, order=None) -> float:
        errs = [e["rel_err"] for e in self.entries if order is None or e["order"] == order]
        return max(errs) if errs else 0.0

    def ok(self, first_tol=1e-5, second_tol=1e-3) -> bool:
        return self.max_rel_err(1) <= first_tol and self.max_rel_err(2) <= second_tol


def _richardson(diff, h):
    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0


def h_derivative_check(field: PhaseField, first_step=1e-6, second_step=1e-4) -> DerivativeReport:
    """Compare all closed-form h-derivative matrices at the base point
    against finite differences of ``eval_h``."""
    left = field.shock.left
    base = np.array([left.v, left.theta, 0.0, 0.0, 0.0, 0.0])  # (v, th, vp, vpp, thp, eps)

    def h_of(x):
        p = ReducedPoint(x[0], x[2], x[3], x[5])
        return eval_h(p, x[1], x[4], field)

    def d1(k, h):
        def diff(h):
            xp, xm = base.copy(), base.copy()
            xp[k] += h
            xm[k] -= h
            return (h_of(xp) - h_of(xm)) / (2.0 * h)

        return diff(h)

    def d2(j, k, h):
        def diff(h):
            if j == k:
                xp, xm = base.copy(), base.copy()
                xp[j] += h
                xm[j] -= h
                return (h_of(xp) - 2.0 * h_of(base) + h_of(xm)) / h**2
            out = 0.0
            for sj in (+1, -1):
                for sk in (+1, -1):
                    x = base.copy()
                    x[j] += sj * h
                    x[k] += sk * h
                    out = out + sj * sk * h_of(x)
            return out / (4.0 * h**2)

        return _richardson(diff, h)

    report = DerivativeReport()
    names = ["v", "theta", "vp", "vpp", "thetap", "eps"]

    analytic_th = base_h_theta_matrix(field)
    for col, k in enumerate((1, 4)):  # theta, theta'
        fd = d1(k, first_step)
        for row in range(2):
            report.add("hderth", f"dh{row + 1}/d{names[k]}", analytic_th[row, col], fd[row], 1)

    analytic_x = base_h_matrix(field)
    for col, k in enumerate((0, 2, 3, 5)):  # v, v', v'', eps
        fd = d1(k, first_step)
        for row in range(2):
            report.add("hderiv", f"dh{row + 1}/d{names[k]}", analytic_x[row, col], fd[row], 1)

    analytic_2 = base_h_second(field)
    pairs = [(0, 0), (0, 1), (1, 1), (5, 0), (5, 1), (5, 5)]
    labels = ["v.v", "v.theta", "theta.theta", "eps.v", "eps.theta", "eps.eps"]
    for col, ((j, k), lab) in enumerate(zip(pairs, labels)):
        fd = d2(j, k, second_step)
        for row in range(2):
            report.add("h_second", f"d2h{row + 1}/d({lab})", analytic_2[row, col], fd[row], 2)
    return report


def g_derivative_check(field: PhaseField, first_step=1e-6, second_step=1e-4) -> DerivativeReport:
    """Compare the closed-form g-derivative matrices at the base point
    against finite differences of the implicit solve."""
    left = field.shock.left
    base = np.array([left.v, 0.0, 0.0, 0.0])  # (v, vp, vpp, eps)

    def g_of(x):
        return np.array(solve_theta(ReducedPoint(*x), field))

    def d1(k, h):
        xp, xm = base.copy(), base.copy()
        xp[k] += h
        xm[k] -= h
        return (g_of(xp) - g_of(xm)) / (2.0 * h)

    def d2(j, k, h):
        def diff(h):
            if j == k:
                xp, xm = base.copy(), base.copy()
                xp[j] += h
                xm[j] -= h
                return (g_of(xp) - 2.0 * g_of(base) + g_of(xm)) / h**2
            out = 0.0
            for sj in (+1, -1):
                for sk in (+1, -1):
                    x = base.copy()
                    x[j] += sj * h
                    x[k] += sk * h
                    out = out + sj * sk * g_of(x)
            return out / (4.0 * h**2)

        return _richardson(diff, h)

    report = DerivativeReport()
    names = ["v", "vp", "vpp", "eps"]

    analytic_g = base_g_matrix(field)
    for k in range(4):
        fd = d1(k, first_step)
        for row in range(2):
            report.add("gder", f"dg{row + 1}/d{names[k]}", analytic_g[row, k], fd[row], 1)

    block = base_g_second_block(field)
    fd_vv = d2(0, 0, second_step)
    fd_ve = d2(0, 3, second_step)
    fd_ee = d2(3, 3, second_step)
    for row in range(2):
        report.add("g_second", f"d2g{row + 1}/d(v.v)", block[row, 0], fd_vv[row], 2)
        report.add("g_second", f"d2g{row + 1}/d(v.eps)", block[row, 1], fd_ve[row], 2)
        report.add("g_second", f"d2g{row + 1}/d(eps.eps)", 0.0, fd_ee[row], 2)
    return report
