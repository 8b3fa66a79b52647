"""Autonomous first-order ODE field for the traveling-wave profile.

The field is the integrated shock system solved for the derivatives:

    v' = (v/tau)   * (-sigma*(v - v_-) - (u - u_-))
    u' = (v/mu)    * (-sigma*(u - u_-) + (p - p_-))
    th' = (v/kappa) * (-sigma*(R/(gamma-1)*(th - th_-) - (u - u_-)^2/2) + p_-*(u - u_-))

with analytic Jacobian and eigenstructure analysis at the left end state.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .gas import GasConstants, State, TransportModel, pressure
from .hugoniot import ShockData, make_shock, rh_residual

RH_CONSISTENCY_TOL = 1e-10


@dataclass
class PhaseField:
    """Bundles a shock, the gas, and the transport model into an ODE field."""

    shock: ShockData
    gas: GasConstants
    coeffs: TransportModel

    def __post_init__(self):
        res = rh_residual(self.shock.left, self.shock.right, self.shock.sigma_eps, self.gas)
        scale = max(1.0, abs(self.shock.sigma_eps)) ** 3 * max(
            1.0, self.shock.left.v, self.shock.left.theta, abs(self.shock.left.u)
        )
        if np.max(np.abs(res)) > RH_CONSISTENCY_TOL * scale:
            raise ValueError(f"shock data violates the jump relations: residual {res}")


def make_field(
    left: State, eps: float, family: int, gas: GasConstants, coeffs: TransportModel
) -> PhaseField:
    """Convenience constructor: build the shock and wrap it in a field."""
    return PhaseField(shock=make_shock(left, eps, family, gas), gas=gas, coeffs=coeffs)


def _as_array(state):
    if isinstance(state, State):
        return state.as_array()
    return np.asarray(state, dtype=float)


def rhs(state, field: PhaseField) -> np.ndarray:
    """Evaluate the field at a state (State or length-3 array) -> (v', u', th')."""
    y = _as_array(state)
    return rhs_many(y[None, :], field)[0]


def rhs_many(states: np.ndarray, field: PhaseField) -> np.ndarray:
    """Vectorized field evaluation for an (N, 3) array of states."""
    v, u, th = states[..., 0], states[..., 1], states[..., 2]
    gas, shock = field.gas, field.shock
    left = shock.left
    sigma = shock.sigma_eps
    p_minus = pressure(left, gas)

    tau = field.coeffs.tau(th)[0]
    mu = field.coeffs.mu(th)[0]
    kappa = field.coeffs.kappa(th)[0]

    dv = v - left.v
    du = u - left.u
    dth = th - left.theta
    p = gas.R * th / v

    f = np.empty_like(states)
    f[..., 0] = v / tau * (-sigma * dv - du)
    f[..., 1] = v / mu * (-sigma * du + (p - p_minus))
    f[..., 2] = v / kappa * (-sigma * (gas.R / (gas.gamma - 1.0) * dth - 0.5 * du**2) + p_minus * du)
    return f


def rhs_jacobian(state, field: PhaseField) -> np.ndarray:
    """Analytic 3x3 Jacobian of ``rhs`` with respect to (v, u, theta)."""
    y = _as_array(state)
    return rhs_jacobian_many(y[None, :], field)[0]


def rhs_jacobian_many(states: np.ndarray, field: PhaseField) -> np.ndarray:
    """Vectorized Jacobians, shape (N, 3, 3)."""
    v, u, th = states[..., 0], states[..., 1], states[..., 2]
    gas, shock = field.gas, field.shock
    left = shock.left
    sigma = shock.sigma_eps
    p_minus = pressure(left, gas)
    R, gamma = gas.R, gas.gamma

    tau, dtau, _ = field.coeffs.tau(th)
    mu, dmu, _ = field.coeffs.mu(th)
    kappa, dkappa, _ = field.coeffs.kappa(th)

    dv = v - left.v
    du = u - left.u
    dth = th - left.theta
    p = R * th / v

    f = rhs_many(states, field)

    J = np.empty(states.shape[:-1] + (3, 3))
    J[..., 0, 0] = (-sigma * dv - du) / tau - sigma * v / tau
    J[..., 0, 1] = -v / tau
    J[..., 0, 2] = -(dtau / tau) * f[..., 0]

    J[..., 1, 0] = (-sigma * du - p_minus) / mu
    J[..., 1, 1] = -sigma * v / mu
    J[..., 1, 2] = R / mu - (dmu / mu) * f[..., 1]

    J[..., 2, 0] = f[..., 2] / v
    J[..., 2, 1] = v / kappa * (sigma * du + p_minus)
    J[..., 2, 2] = -sigma * R / (gamma - 1.0) * v / kappa - (dkappa / kappa) * f[..., 2]
    return J


def second_derivative_many(states: np.ndarray, field: PhaseField) -> np.ndarray:
    """(v'', u'', th'') along trajectories via the chain rule J_F(y) . F(y)."""
    f = rhs_many(states, field)
    J = rhs_jacobian_many(states, field)
    return np.einsum("...ij,...j->...i", J, f)


@dataclass
class EndStateEigen:
    """Eigenstructure of the field linearized at the left end state."""

    eigenvalues: np.ndarray  # (3,) complex; [0] is the unstable one
    unstable_direction: np.ndarray  # unit vector, orientation fixed by family
    det: float
    trace: float
    jacobian: np.ndarray = dc_field(repr=False, default=None)

    @property
    def unstable_eigenvalue(self) -> float:
        return float(self.eigenvalues[0].real)


def _positive_real_cubic_root(t, m, d):
    # p(lam) = lam^3 - t lam^2 + m lam - d, with p(0) = -d < 0, so there
    # is a root in (0, B] with B a Cauchy-type bound.
    B = 1.0 + max(abs(t), abs(m), abs(d))

    def p(x):
        return ((x - t) * x + m) * x - d

    def dp(x):
        return (3.0 * x - 2.0 * t) * x + m

    lo, hi = 0.0, B
    while p(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if p(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * B:
            break
    x = 0.5 * (lo + hi)
    for _ in range(50):  # Newton polish
        step = p(x) / dp(x)
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def end_state_eigenstructure(field: PhaseField) -> EndStateEigen:
    """Eigenvalues and unstable direction of the Jacobian at the left end state.

    Solves the characteristic cubic for its unique positive real root and
    deflates for the remaining pair.  Asserts det > 0, trace < 0, and the
    (+, -, -) real-part signature; the unstable eigenvector is oriented so
    its v-component points toward the right state (positive for 3-shocks,
    negative for 1-shocks).

    Raises
    ------
    ValueError
        For eps = 0, where the slow eigenvalue degenerates to zero.
    RuntimeError
        When the sign classification fails.
    """
    shock = field.shock
    if shock.eps == 0:
        raise ValueError("eigenstructure degenerates at eps=0 (determinant vanishes)")

    J = rhs_jacobian(shock.left, field)
    t = float(np.trace(J))
    d = float(np.linalg.det(J))
    # sum of principal 2x2 minors
    m = float(
        J[0, 0] * J[1, 1]
        - J[0, 1] * J[1, 0]
        + J[0, 0] * J[2, 2]
        - J[0, 2] * J[2, 0]
        + J[1, 1] * J[2, 2]
        - J[1, 2] * J[2, 1]
    )

    if not d > 0:
        raise RuntimeError(f"expected positive determinant at the left end state, got {d}")
    if not t < 0:
        raise RuntimeError(f"expected negative trace at the left end state, got {t}")

    lam_u = _positive_real_cubic_root(t, m, d)
    # deflate: lam^3 - t lam^2 + m lam - d = (lam - lam_u)(lam^2 + b lam + c)
    b = lam_u - t
    c = m + lam_u * b
    disc = complex(b * b - 4.0 * c) ** 0.5
    lam2 = (-b + disc) / 2.0
    lam3 = (-b - disc) / 2.0

    if not (lam_u > 0 and lam2.real < 0 and lam3.real < 0):
        raise RuntimeError(
            f"eigenvalue signature is not (+,-,-): {lam_u}, {lam2}, {lam3}"
        )

    M = J - lam_u * np.eye(3)
    _, _, Vh = np.linalg.svd(M)
    e_u = Vh[-1]
    want_positive_v = shock.family == 3
    if (e_u[0] > 0) != want_positive_v:
        e_u = -e_u

    return EndStateEigen(
        eigenvalues=np.array([lam_u, lam2, lam3], dtype=complex),
        unstable_direction=e_u,
        det=d,
        trace=t,
        jacobian=J,
    )
