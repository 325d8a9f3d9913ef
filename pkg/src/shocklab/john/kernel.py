"""Compiled inner loops of the geometric-coordinate solver.

Variables are stored in a rescaled, overflow-free form. With the log clock
``s = ln(1 + t)``, ``e = exp(-s)`` and ``g = (1 + t) / r``:

    D = r - t          A = r Psi          mu
    W = mu Lbar(r Psi) B = (1 + t)**2 L(r Psi)

All right-hand sides below are ``d/ds`` of these quantities; every factor
of ``e`` that appears multiplies a bounded term, so ``e`` may underflow to
zero without harm.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

OK = 0
HYPERBOLICITY_LOST = 1
MU_VANISHED = 2

PICARD_TOL = 1.0e-15
PICARD_MAXITER = 30


@njit(cache=True)
def _local(D, A, mu, W, B, e):
    g = 1.0 / (1.0 + (D - 1.0) * e)
    psi = A * e * g
    c = math.sqrt(1.0 + psi) if psi > -1.0 else 0.0
    pt = B * e - c * A * g  # (1 + t) r L(Psi)
    vh = W + mu * c * A * e * g  # r mu Lbar(Psi)
    return g, psi, c, pt, vh


@njit(cache=True)
def _source(D, A, mu, W, B, e):
    """``(mu Lbar L(r Psi)) / e**2`` in rescaled form."""
    g, psi, c, pt, vh = _local(D, A, mu, W, B, e)
    return 0.25 * g / (1.0 + psi) * (mu * e * pt * pt + 3.0 * pt * vh) + 0.5 * g * g * A * vh / c


@njit(cache=True)
def rhs(D, A, mu, W, B, e, dD, dA, dmu, dW):
    n = D.size
    for j in range(n):
        g, psi, c, pt, vh = _local(D[j], A[j], mu[j], W[j], B[j], e)
        if 1.0 + psi <= 0.0:
            return HYPERBOLICITY_LOST
        dD[j] = A[j] * g / (1.0 + c)
        dA[j] = B[j] * e
        dmu[j] = -(W[j] + mu[j] * B[j] * e * e) * g / (4.0 * (1.0 + psi))
        dW[j] = 0.5 * e * g * pt * vh / (1.0 + psi) + 0.25 * A[j] * e * g * g * (vh - mu[j] * e * pt) / c
    return OK


@njit(cache=True)
def sweep(D0, A0, mu0, W0, B0, e0, D1, A1, mu1, W1, e1, ds, du, B1):
    """Box-scheme sweep in ``u`` for ``B`` on the new level.

    Discretises ``mu e (dB/ds - 2 B) + 2 dB/du = source`` centred on each
    cell ``(s + ds/2, u_j - du/2)``; the unknown enters the source only
    weakly, so each node is closed by Picard iteration.
    """
    n = D0.size
    B1[0] = 0.0
    for j in range(1, n):
        m = 0.25 * e0 * (mu0[j] + mu0[j - 1]) + 0.25 * e1 * (mu1[j] + mu1[j - 1])
        r_known = (
            _source(D0[j - 1], A0[j - 1], mu0[j - 1], W0[j - 1], B0[j - 1], e0)
            + _source(D0[j], A0[j], mu0[j], W0[j], B0[j], e0)
            + _source(D1[j - 1], A1[j - 1], mu1[j - 1], W1[j - 1], B1[j - 1], e1)
        )
        coef = m * (0.5 / ds - 0.5) + 1.0 / du
        rest = (
            m * ((B1[j - 1] - B0[j] - B0[j - 1]) * (0.5 / ds) - 0.5 * (B1[j - 1] + B0[j] + B0[j - 1]))
            + (B0[j] - B0[j - 1] - B1[j - 1]) / du
        )
        b = B0[j]
        for _ in range(PICARD_MAXITER):
            src = 0.25 * (r_known + _source(D1[j], A1[j], mu1[j], W1[j], b, e1))
            nb = (src - rest) / coef
            if abs(nb - b) <= PICARD_TOL * (1.0 + abs(nb)):
                b = nb
                break
            b = nb
        B1[j] = b


@njit(cache=True, nogil=True)
def heun_step(D, A, mu, W, B, s, ds, du, Dn, An, mun, Wn, Bn):
    """One predictor-corrector step from ``s`` to ``s + ds``; writes ``*n``."""
    n = D.size
    e0 = math.exp(-s)
    e1 = math.exp(-(s + ds))
    F0 = np.empty((4, n))
    F1 = np.empty((4, n))
    status = rhs(D, A, mu, W, B, e0, F0[0], F0[1], F0[2], F0[3])
    if status != OK:
        return status
    Ds = D + ds * F0[0]
    As = A + ds * F0[1]
    mus = mu + ds * F0[2]
    Ws = W + ds * F0[3]
    Bs = np.empty(n)
    sweep(D, A, mu, W, B, e0, Ds, As, mus, Ws, e1, ds, du, Bs)
    status = rhs(Ds, As, mus, Ws, Bs, e1, F1[0], F1[1], F1[2], F1[3])
    if status != OK:
        return status
    for j in range(n):
        Dn[j] = D[j] + 0.5 * ds * (F0[0, j] + F1[0, j])
        An[j] = A[j] + 0.5 * ds * (F0[1, j] + F1[1, j])
        mun[j] = mu[j] + 0.5 * ds * (F0[2, j] + F1[2, j])
        Wn[j] = W[j] + 0.5 * ds * (F0[3, j] + F1[3, j])
    sweep(D, A, mu, W, B, e0, Dn, An, mun, Wn, e1, ds, du, Bn)
    for j in range(n):
        if mun[j] <= 0.0:
            return MU_VANISHED
        if 1.0 + An[j] * e1 / (1.0 + (Dn[j] - 1.0) * e1) <= 0.0:
            return HYPERBOLICITY_LOST
    return OK


@njit(cache=True)
def monitors(u, D, A, mu, W, B, s, out):
    """Per-slice suprema written to ``out``:

    0  r**2 |L Psi|            1  r |mu Lbar Psi|       2  r |Psi|
    3  |mu - 1| / ln(e + t)    4  |1 - r + t - u| / ln(e + t)
    5  |r L mu + r mu Lbar Psi / 4|
    """
    e = math.exp(-s)
    log_clock = s + math.log1p((math.e - 1.0) * e)
    for k in range(6):
        out[k] = 0.0
    for j in range(D.size):
        g, psi, c, pt, vh = _local(D[j], A[j], mu[j], W[j], B[j], e)
        vals = (
            abs(pt / g),
            abs(vh),
            abs(A[j]),
            abs(mu[j] - 1.0) / log_clock,
            abs(1.0 - u[j] - D[j]) / log_clock,
            abs(-(W[j] + mu[j] * B[j] * e * e) / (4.0 * (1.0 + psi)) + 0.25 * vh),
        )
        for k in range(6):
            if vals[k] > out[k]:
                out[k] = vals[k]


@njit(cache=True)
def transversal_rate(D, A, mu, W, B, s, j):
    """``|mu Lbar Psi| (1 + t) ln(e + t)`` at node ``j``."""
    e = math.exp(-s)
    g, psi, c, pt, vh = _local(D[j], A[j], mu[j], W[j], B[j], e)
    return abs(vh) * g * (s + math.log1p((math.e - 1.0) * e))
