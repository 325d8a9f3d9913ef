r"""Exact characteristic solver for the inviscid Burgers equation

.. math::

    \partial_t \Psi + \Psi \partial_x \Psi = 0, \qquad \Psi(0, x) = \mathring\Psi(x).

The solution is constant along the straight characteristics
``x(t, alpha) = alpha + t * psi0(alpha)``; it stays classical until the
Jacobian ``1 + t * psi0'(alpha)`` first vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shocklab.errors import Blowup, NoConvergence, OutOfLifespan
from shocklab.profiles import Profile1D

ROOT_TOL = 1.0e-12
ROOT_MAXITER = 100
BLOWUP_GRID = 100_000


def characteristic_position(profile: Profile1D, t: float, alpha):
    return alpha + t * profile(alpha)


def jacobian(profile: Profile1D, t: float, alpha):
    return 1.0 + t * profile.d(alpha)


@dataclass(frozen=True)
class CharacteristicFan:
    alphas: np.ndarray
    positions: np.ndarray
    jacobians: np.ndarray
    time: float


def fan(profile: Profile1D, t: float, alphas) -> CharacteristicFan:
    alphas = np.sort(np.asarray(alphas, dtype=float))
    return CharacteristicFan(
        alphas=alphas,
        positions=characteristic_position(profile, t, alphas),
        jacobians=jacobian(profile, t, alphas),
        time=float(t),
    )


def _second_derivative(profile: Profile1D, x: float, h: float) -> tuple[float, float]:
    """(psi0'', psi0''') at ``x`` by central differences of the derivative."""
    d = profile.d
    xs = np.array([x - 2 * h, x - h, x, x + h, x + 2 * h])
    v = d(xs)
    d2 = (-v[4] + 8 * v[3] - 8 * v[1] + v[0]) / (12 * h)
    d3 = (v[3] - 2 * v[2] + v[1]) / h**2
    return float(d2), float(d3)


def steepest_descent(profile: Profile1D, n_grid: int = BLOWUP_GRID) -> tuple[float, float]:
    """Global minimum of ``psi0'``: returns ``(alpha_min, psi0'(alpha_min))``.

    Dense-grid search followed by a single Newton polish on ``psi0'' = 0``,
    accepted only if it improves the grid value inside the neighbouring cells.
    """
    a = profile.window
    grid = np.linspace(-a, a, n_grid)
    slopes = profile.d(grid)
    k = int(np.argmin(slopes))
    alpha, best = float(grid[k]), float(slopes[k])
    dx = grid[1] - grid[0]
    d2, d3 = _second_derivative(profile, alpha, min(dx, 1e-3))
    if d3 > 0.0:
        cand = alpha - d2 / d3
        if abs(cand - alpha) <= dx:
            val = float(profile.d(np.array([cand]))[0])
            if val <= best:
                alpha, best = cand, val
    return alpha, best


def blowup_time(profile: Profile1D, n_grid: int = BLOWUP_GRID) -> float | None:
    """First time the characteristic Jacobian vanishes, or ``None``."""
    _, slope = steepest_descent(profile, n_grid)
    if slope >= 0.0:
        return None
    return -1.0 / slope


def evaluate(profile: Profile1D, t: float, x, *, t_star: float | None = None):
    """Solution ``Psi(t, x)`` by inverting ``x = alpha + t psi0(alpha)``.

    Safeguarded Newton iteration in ``alpha``; the bracket
    ``[x - t M, x + t M]`` with ``M = sup |psi0|`` always contains the root.
    """
    if t_star is None:
        t_star = blowup_time(profile)
    if t_star is not None and t >= t_star:
        raise OutOfLifespan(f"t = {t} is past the blow-up time {t_star}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    if t == 0.0:
        out = profile(xs)
        return float(out[0]) if scalar else out

    w = profile.window
    bound = float(np.max(np.abs(profile(np.linspace(-w, w, 4097))))) * 1.01 + 1e-14
    alphas = np.array([_invert(profile, t, xi, bound) for xi in xs])
    out = profile(alphas)
    return float(out[0]) if scalar else out


def launch_point(profile: Profile1D, t: float, x: float) -> float:
    """The ``alpha`` whose characteristic passes through ``(t, x)``."""
    w = profile.window
    bound = float(np.max(np.abs(profile(np.linspace(-w, w, 4097))))) * 1.01 + 1e-14
    return _invert(profile, t, float(x), bound)


def _invert(profile: Profile1D, t: float, x: float, bound: float) -> float:
    def g(a):
        arr = np.array([a])
        return float(a + t * profile(arr)[0] - x), float(1.0 + t * profile.d(arr)[0])

    lo, hi = x - t * bound, x + t * bound
    glo, _ = g(lo)
    ghi, _ = g(hi)
    if glo > 0.0 or ghi < 0.0:
        raise NoConvergence(f"no bracket for x = {x} at t = {t}")
    a = 0.5 * (lo + hi)
    for _ in range(ROOT_MAXITER):
        val, slope = g(a)
        if val == 0.0:
            return a
        if val < 0.0:
            lo = a
        else:
            hi = a
        step_ok = slope > 0.0
        if step_ok:
            cand = a - val / slope
            step_ok = lo < cand < hi
        new = cand if step_ok else 0.5 * (lo + hi)
        if abs(new - a) <= ROOT_TOL * max(1.0, abs(a)) or hi - lo <= ROOT_TOL:
            return new
        a = new
    raise NoConvergence(f"root finding did not converge at x = {x}, t = {t}")


def riccati_slope(y0: float, t: float) -> float:
    """Exact solution of ``dy/dt = -y**2`` with ``y(0) = y0``."""
    denom = 1.0 + t * y0
    if y0 < 0.0 and denom <= 0.0:
        raise Blowup(f"slope blows up at t = {-1.0 / y0}")
    return y0 / denom


def table(profile: Profile1D, t_max: float, n_alpha: int, n_t: int = 11) -> list[dict]:
    """Rows ``(t, alpha, x, jacobian, psi)`` over a uniform fan of launch points."""
    w = profile.window
    alphas = np.linspace(-w, w, n_alpha)
    rows = []
    for t in np.linspace(0.0, t_max, n_t):
        f = fan(profile, float(t), alphas)
        psi = profile(alphas)
        for a, x, j, p in zip(f.alphas, f.positions, f.jacobians, psi):
            rows.append(
                {"t": float(t), "alpha": float(a), "x": float(x), "jacobian": float(j), "psi": float(p)}
            )
    return rows


def first_jacobian_zero(profile: Profile1D, n_alpha: int = BLOWUP_GRID) -> float:
    """Smallest ``t`` with ``1 + t psi0'(alpha) = 0`` over a launch-point fan.

    Independent of :func:`blowup_time`: no polishing, pure fan measurement.
    """
    w = profile.window
    slopes = profile.d(np.linspace(-w, w, n_alpha))
    neg = slopes[slopes < 0.0]
    if neg.size == 0:
        return math.inf
    return float(np.min(-1.0 / neg))
