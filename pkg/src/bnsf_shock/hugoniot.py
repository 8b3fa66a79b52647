"""Rankine-Hugoniot jump relations, Lax admissibility, and shock speeds.

Shocks are parameterized by (left state, amplitude eps, family) and the
right state is constructed in closed form; the shock speed obeys

    sigma^2 = gamma * p_minus / (v_minus + (gamma+1)/2 * delta),

where delta = v_plus - v_minus is the signed volume jump (delta = +eps for
a 3-shock, -eps for a 1-shock) and the speed carries the family's sign.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .gas import GasConstants, State, pressure, total_energy

# Theory only covers "sufficiently small" amplitudes; these empirical
# bounds are relative to v_minus.
EPS_WARN_FRACTION = 0.05
EPS_MAX_FRACTION = 0.2


@dataclass
class ShockData:
    """End states, amplitude, and speeds for an admissible 1- or 3-shock.

    ``A`` is the tail-law constant of the logistic profile law; it is
    filled in by the slow-fast reduction and may be None until then.
    """

    left: State
    right: State
    eps: float
    sigma_eps: float
    sigma_star: float
    family: int
    A: float | None = None

    def to_dict(self) -> dict:
        return {
            "v_minus": self.left.v,
            "u_minus": self.left.u,
            "theta_minus": self.left.theta,
            "v_plus": self.right.v,
            "u_plus": self.right.u,
            "theta_plus": self.right.theta,
            "eps": self.eps,
            "sigma_eps": self.sigma_eps,
            "sigma_star": self.sigma_star,
            "family": self.family,
            "A": self.A,
        }

    @staticmethod
    def from_dict(d: dict) -> "ShockData":
        return ShockData(
            left=State(d["v_minus"], d["u_minus"], d["theta_minus"]),
            right=State(d["v_plus"], d["u_plus"], d["theta_plus"]),
            eps=d["eps"],
            sigma_eps=d["sigma_eps"],
            sigma_star=d["sigma_star"],
            family=int(d["family"]),
            A=d.get("A"),
        )


def _check_family(family):
    if family not in (1, 3):
        raise ValueError(f"shock family must be 1 or 3, got {family!r}")


def _signed_jump(eps, family):
    return eps if family == 3 else -eps


def shock_speed(left: State, eps: float, family: int, gas: GasConstants) -> float:
    """Shock speed sigma_eps for amplitude eps; at eps = 0 this is sigma_star.

    The sign follows the family: positive for 3-shocks, negative for
    1-shocks.  Raises ValueError when the denominator of the closed-form
    speed is nonpositive (eps outside the validity range).
    """
    _check_family(family)
    if eps < 0:
        raise ValueError(f"shock amplitude eps must be nonnegative, got {eps}")
    if eps > EPS_MAX_FRACTION * left.v:
        raise ValueError(
            f"eps={eps} exceeds the validity ceiling {EPS_MAX_FRACTION}*v_minus={EPS_MAX_FRACTION * left.v}"
        )
    if eps > EPS_WARN_FRACTION * left.v:
        warnings.warn(
            f"eps={eps} above {EPS_WARN_FRACTION}*v_minus; small-amplitude theory may degrade",
            stacklevel=2,
        )
    p_minus = pressure(left, gas)
    denom = left.v + 0.5 * (gas.gamma + 1.0) * _signed_jump(eps, family)
    if denom <= 0:
        raise ValueError(f"shock speed denominator nonpositive ({denom}); eps too large")
    mag = math.sqrt(gas.gamma * p_minus / denom)
    return mag if family == 3 else -mag


def sigma_star(left: State, family: int, gas: GasConstants) -> float:
    """Zero-amplitude (acoustic) speed, signed by family."""
    return shock_speed(left, 0.0, family, gas)


def right_state(left: State, eps: float, family: int, gas: GasConstants) -> State:
    """Construct the right end state across a shock of given amplitude.

    v_plus = v_minus + delta, u_plus from the mass jump, p_plus from the
    momentum jump, theta_plus closed by the ideal-gas law; the energy jump
    relation then holds automatically.
    """
    sigma = shock_speed(left, eps, family, gas)
    delta = _signed_jump(eps, family)
    v_plus = left.v + delta
    u_plus = left.u - sigma * delta
    p_plus = pressure(left, gas) - sigma**2 * delta
    theta_plus = p_plus * v_plus / gas.R
    if theta_plus <= 0:
        raise ValueError(f"right-state temperature nonpositive ({theta_plus}); eps too large")
    return State(v_plus, u_plus, theta_plus)


def make_shock(left: State, eps: float, family: int, gas: GasConstants) -> ShockData:
    """Assemble a ShockData with both speeds and the constructed right state."""
    return ShockData(
        left=left,
        right=right_state(left, eps, family, gas),
        eps=eps,
        sigma_eps=shock_speed(left, eps, family, gas),
        sigma_star=sigma_star(left, family, gas),
        family=family,
    )


def rh_residual(left: State, right: State, sigma: float, gas: GasConstants) -> np.ndarray:
    """The three Rankine-Hugoniot defects (mass, momentum, energy)."""
    p_l = pressure(left, gas)
    p_r = pressure(right, gas)
    return np.array(
        [
            -sigma * (right.v - left.v) - (right.u - left.u),
            -sigma * (right.u - left.u) + (p_r - p_l),
            -sigma * (total_energy(right, gas) - total_energy(left, gas))
            + p_r * right.u
            - p_l * left.u,
        ]
    )


def check_lax(left: State, right: State) -> int:
    """Classify an end-state pair by the Lax entropy sign pattern.

    Returns 1 or 3, or raises ValueError when the jump signs match
    neither admissible branch.
    """
    if left.v > right.v and left.u > right.u and left.theta < right.theta:
        return 1
    if left.v < right.v and left.u > right.u and left.theta > right.theta:
        return 3
    raise ValueError(
        "end states match neither Lax branch: "
        f"dv={right.v - left.v:+g}, du={right.u - left.u:+g}, dtheta={right.theta - left.theta:+g}"
    )
