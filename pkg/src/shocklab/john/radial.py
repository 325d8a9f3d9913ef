"""Method-of-lines solver for John's radial equation in ``(t, r)`` coordinates.

Evolves ``w = r * Psi`` under

    w_tt = (1 + Psi) w_rr + r (Psi_t)**2 / (1 + Psi),    Psi = w / r,

on a uniform radial grid with an odd reflection through ``r = 0``
(fourth-order stencils, classical RK4). It is used only over short time
windows, to carry data posed before ``t = 0`` up to the slice where the
eikonal function is initialised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from shocklab.errors import HyperbolicityLost

GHOST = 2


def _pad_odd(w: np.ndarray) -> np.ndarray:
    # two odd ghosts at the origin, two zero ghosts at the far edge
    return np.concatenate([-w[GHOST:0:-1], w, np.zeros(GHOST)])


def _rhs(w, v, r, h):
    wp = _pad_odd(w)
    wrr = (
        -wp[4:] + 16 * wp[3:-1] - 30 * wp[2:-2] + 16 * wp[1:-3] - wp[:-4]
    ) / (12 * h**2)
    psi = np.empty_like(w)
    psi[1:] = w[1:] / r[1:]
    psi[0] = (-wp[4] + 8 * wp[3] - 8 * wp[1] + wp[0]) / (12 * h)
    if np.any(1.0 + psi <= 0.0):
        raise HyperbolicityLost("1 + Psi <= 0 during radial pre-evolution")
    src = np.zeros_like(w)
    src[1:] = v[1:] ** 2 / r[1:] / (1.0 + psi[1:])
    acc = (1.0 + psi) * wrr + src
    acc[0] = 0.0
    return v, acc


@dataclass(frozen=True)
class RadialSlice:
    """``w = r Psi`` and ``w_t`` on a uniform grid, with spline access."""

    r: np.ndarray
    w: np.ndarray
    wt: np.ndarray

    def __post_init__(self) -> None:
        # odd extension keeps the spline accurate near the origin
        rr = np.concatenate([-self.r[:0:-1], self.r])
        ww = np.concatenate([-self.w[:0:-1], self.w])
        vv = np.concatenate([-self.wt[:0:-1], self.wt])
        object.__setattr__(self, "_w", make_interp_spline(rr, ww, k=5))
        object.__setattr__(self, "_v", make_interp_spline(rr, vv, k=5))

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, self._w(r) / safe, self._w(r, 1))

    def psi_t(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, self._v(r) / safe, self._v(r, 1))

    def psi_r(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.0)
        return np.where(
            r > 0, (self._w(r, 1) * safe - self._w(r)) / safe**2, 0.5 * self._w(r, 2)
        )


def evolve(psi0, psi0_dot, duration: float, r_max: float = 2.0, n: int = 3200, cfl: float = 0.5) -> RadialSlice:
    """Advance radial data ``(Psi, Psi_t)`` by ``duration`` time units."""
    r = np.linspace(0.0, r_max, n + 1)
    h = r[1] - r[0]
    w = r * psi0(r)
    v = r * psi0_dot(r)
    n_steps = max(1, int(np.ceil(duration / (cfl * h))))
    dt = duration / n_steps
    for _ in range(n_steps):
        k1w, k1v = _rhs(w, v, r, h)
        k2w, k2v = _rhs(w + 0.5 * dt * k1w, v + 0.5 * dt * k1v, r, h)
        k3w, k3v = _rhs(w + 0.5 * dt * k2w, v + 0.5 * dt * k2v, r, h)
        k4w, k4v = _rhs(w + dt * k3w, v + dt * k3v, r, h)
        w = w + dt / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
        v = v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return RadialSlice(r=r, w=w, wt=v)
