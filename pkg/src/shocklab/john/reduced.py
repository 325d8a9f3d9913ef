"""Closed-form reduced model for the inverse foliation density.

Along each outgoing characteristic the transversal derivative
``W = mu Lbar(r Psi)`` is nearly frozen at its initial value ``delta(u)``,
and ``L mu = -W / (4 r) + ...`` integrates to

    mu(t, u) ~ 1 - (delta(u) / 4) ln((1 - u + t) / (1 - u)).

A shock is therefore predicted on characteristics with ``delta(u) > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shocklab.john.data import DataSpec

TRANSPORT_RATE = 0.25


def transversal_data_derivative(data: DataSpec, u):
    """``(d_t - d_r)(r Psi)`` on ``t = 0`` at ``r = 1 - u``."""
    u = np.asarray(u, dtype=float)
    r = 1.0 - u
    sd = data.initial
    out = r * (sd.psi_t(r) - sd.psi_r(r)) - sd.psi(r)
    return float(out) if out.ndim == 0 else out


def reduced_mu_profile(data: DataSpec, u, t):
    u = np.asarray(u, dtype=float)
    delta = transversal_data_derivative(data, u)
    out = 1.0 - TRANSPORT_RATE * np.log1p(np.asarray(t, dtype=float) / (1.0 - u)) * delta
    return float(out) if np.ndim(out) == 0 else out


def _log_expm1(x: np.ndarray) -> np.ndarray:
    return x + np.log1p(-np.exp(-x))


@dataclass(frozen=True)
class PredictedShock:
    log_time: float
    u: float

    @property
    def time(self) -> float:
        return math.exp(self.log_time) if self.log_time < 709.0 else math.inf


def predict_shock_time(data: DataSpec, U0: float, n_u: int = 400) -> PredictedShock | None:
    """Earliest zero of the reduced profile over the nodes ``u in (0, U0]``.

    Times are handled in log form since they are typically ``exp(O(1/lambda))``.
    """
    if not 0.0 < U0 < 1.0:
        raise ValueError("U0 must lie in (0, 1)")
    u = np.linspace(0.0, U0, n_u + 1)[1:]
    delta = np.atleast_1d(transversal_data_derivative(data, u))
    hot = delta > 0.0
    if not np.any(hot):
        return None
    log_t = np.full(u.shape, np.inf)
    log_t[hot] = np.log1p(-u[hot]) + _log_expm1(1.0 / (TRANSPORT_RATE * delta[hot]))
    k = int(np.argmin(log_t))
    return PredictedShock(log_time=float(log_t[k]), u=float(u[k]))
