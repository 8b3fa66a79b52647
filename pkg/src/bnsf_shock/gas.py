"""Ideal-gas law and temperature-dependent transport coefficient models.

Everything is nondimensional; the default reference gas is R = 1, gamma = 1.4.
A transport model bundles the three positive coefficients (tau, mu, kappa)
as scalar maps theta -> (value, d/dtheta, d2/dtheta2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Evaluations below this temperature are rejected outright; the heat
# capacity may degenerate as theta -> 0 and silent NaNs are worse than
# a hard error.
THETA_MIN = 1e-12


@dataclass(frozen=True)
class GasConstants:
    """Ideal polytropic gas parameters: p = R*theta/v, e = R*theta/(gamma-1)."""

    R: float = 1.0
    gamma: float = 1.4

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"gas constant R must be positive, got {self.R}")
        if not self.gamma > 1:
            raise ValueError(f"adiabatic exponent gamma must exceed 1, got {self.gamma}")


@dataclass(frozen=True)
class State:
    """A point (v, u, theta) in phase space: specific volume, velocity, temperature."""

    v: float
    u: float
    theta: float

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError(f"specific volume must be positive, got {self.v}")
        if not self.theta > 0:
            raise ValueError(f"temperature must be positive, got {self.theta}")

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.u, self.theta], dtype=float)

    @staticmethod
    def from_array(y) -> "State":
        v, u, theta = (float(c) for c in y)
        return State(v, u, theta)


def pressure(state: State, gas: GasConstants) -> float:
    """Ideal-gas pressure R*theta/v."""
    return gas.R * state.theta / state.v


def internal_energy(state: State, gas: GasConstants) -> float:
    """Internal energy R*theta/(gamma-1)."""
    return gas.R * state.theta / (gas.gamma - 1.0)


def total_energy(state: State, gas: GasConstants) -> float:
    """Total energy e + u^2/2."""
    return internal_energy(state, gas) + 0.5 * state.u**2


class TransportModel:
    """Positive C^2 coefficient triple tau(theta), mu(theta), kappa(theta).

    Each coefficient is a callable ``theta -> (value, d1, d2)``; evaluation
    enforces the theta-domain guard and strict positivity of the value.
    Instances are immutable after construction and safe to share.

    Parameters
    ----------
    tau, mu, kappa : callable
        Map a float (or ndarray) temperature to a (value, d1, d2) triple.
    name : str
        Identifier used in run configs and reports.
    """

    def __init__(self, tau, mu, kappa, name="custom"):
        self._tau = tau
        self._mu = mu
        self._kappa = kappa
        self.name = name

    def _eval(self, fn, theta, label):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < THETA_MIN):
            raise ValueError(
                f"{label} evaluated at theta={theta!r}, below the domain guard {THETA_MIN}"
            )
        value, d1, d2 = fn(theta)
        value = np.broadcast_to(np.asarray(value, float), theta.shape)[()]
        d1 = np.broadcast_to(np.asarray(d1, float), theta.shape)[()]
        d2 = np.broadcast_to(np.asarray(d2, float), theta.shape)[()]
        if np.any(value <= 0):
            raise ValueError(f"{label} must stay positive; got {value!r} at theta={theta!r}")
        return value, d1, d2

    def tau(self, theta):
        return self._eval(self._tau, theta, "tau")

    def mu(self, theta):
        return self._eval(self._mu, theta, "mu")

    def kappa(self, theta):
        return self._eval(self._kappa, theta, "kappa")

    def __repr__(self):
        return f"TransportModel({self.name!r})"


def _constant_coeff(c):
    def fn(theta):
        z = np.zeros_like(theta)
        return np.full_like(theta, c), z, z

    return fn


def _power_law_coeff(c0, beta):
    def fn(theta):
        value = c0 * theta**beta
        d1 = c0 * beta * theta ** (beta - 1.0)
        d2 = c0 * beta * (beta - 1.0) * theta ** (beta - 2.0)
        return value, d1, d2

    return fn


def builtin_models(name, **params) -> TransportModel:
    """Construct one of the built-in transport coefficient models.

    Supported names:

    - ``constant``: tau = mu = kappa = c (default 1), or individual
      ``tau``/``mu``/``kappa`` overrides; all derivatives vanish.
    - ``power_law``: mu0*theta**beta style power laws, with prefactors
      ``tau0``, ``mu0``, ``kappa0`` (default 1) and a shared exponent
      ``beta``.
    - ``eek``: tau = 1 + theta^2, mu = kappa = theta^2.

    Raises
    ------
    ValueError
        For an unknown name or a nonpositive parameter.
    """
    for key, val in params.items():
        if key != "beta" and not val > 0:
            raise ValueError(f"parameter {key}={val} must be positive")

    if name == "constant":
        c = params.pop("c", 1.0)
        tau = params.pop("tau", c)
        mu = params.pop("mu", c)
        kappa = params.pop("kappa", c)
        if params:
            raise ValueError(f"unknown parameters for constant model: {sorted(params)}")
        return TransportModel(
            _constant_coeff(tau), _constant_coeff(mu), _constant_coeff(kappa), name="constant"
        )

    if name == "power_law":
        if "beta" not in params:
            raise ValueError("power_law model requires the exponent beta")
        beta = params.pop("beta")
        tau0 = params.pop("tau0", 1.0)
        mu0 = params.pop("mu0", 1.0)
        kappa0 = params.pop("kappa0", 1.0)
        if params:
            raise ValueError(f"unknown parameters for power_law model: {sorted(params)}")
        return TransportModel(
            _power_law_coeff(tau0, beta),
            _power_law_coeff(mu0, beta),
            _power_law_coeff(kappa0, beta),
            name="power_law",
        )

    if name == "eek":
        if params:
            raise ValueError(f"eek model takes no parameters, got {sorted(params)}")

        def tau(theta):
            return 1.0 + theta**2, 2.0 * theta, np.full_like(theta, 2.0)

        def quad(theta):
            return theta**2, 2.0 * theta, np.full_like(theta, 2.0)

        return TransportModel(tau, quad, quad, name="eek")

    raise ValueError(f"unknown transport model {name!r}")
