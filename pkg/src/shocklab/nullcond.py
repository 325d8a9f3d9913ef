"""Null-condition analysis of quadratic nonlinearities and metric families.

Index convention: 0 is time, 1..3 are rectangular space coordinates; the
Minkowski metric is ``m = diag(-1, 1, 1, 1)``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from shocklab.errors import DegenerateSound, InvalidData, NotDifferentiable, WrongKind

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])
NULL_TOL = 1.0e-12
DEFAULT_DIRECTIONS = 4096
SCALAR = "scalar_gPsi"
SYSTEM = "system_gdPhi"
# normalisation of the derivative-dependent failure factor; with -1 the
# contraction gives +1 for the source 2 d_t Phi d_t^2 Phi
SYSTEM_SIGN = -1.0


def _symmetric(a: np.ndarray, axes: tuple[int, int]) -> bool:
    return bool(np.array_equal(a, np.swapaxes(a, *axes)))


@dataclass(frozen=True)
class QuadraticNonlinearity:
    """Constant coefficients ``A^{mu nu sigma}`` (symmetric in ``mu nu``) and ``N^{mu nu}``."""

    A: np.ndarray
    N: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        N = np.asarray(self.N, dtype=float)
        if A.shape != (4, 4, 4) or N.shape != (4, 4):
            raise InvalidData("A must be 4x4x4 and N must be 4x4")
        if not _symmetric(A, (0, 1)) or not _symmetric(N, (0, 1)):
            raise InvalidData("A must be symmetric in its first two indices and N symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "N", N)

    @classmethod
    def from_flat(cls, A=None, N=None) -> QuadraticNonlinearity:
        """Row-major flat lists, symmetrised on load; missing parts are zero."""
        a = np.zeros((4, 4, 4)) if A is None else np.asarray(A, dtype=float).reshape(4, 4, 4)
        n = np.zeros((4, 4)) if N is None else np.asarray(N, dtype=float).reshape(4, 4)
        return cls(0.5 * (a + a.transpose(1, 0, 2)), 0.5 * (n + n.T))

    @classmethod
    def from_scalar_coefficient(cls, A_prime, N=None) -> QuadraticNonlinearity:
        """Lift ``A'^{ab}`` (coefficient of ``Psi d_a d_b Psi``) to ``A'^{ab} delta^s_0``."""
        ap = np.asarray(A_prime, dtype=float).reshape(4, 4)
        A = np.zeros((4, 4, 4))
        A[:, :, 0] = 0.5 * (ap + ap.T)
        n = np.zeros((4, 4)) if N is None else np.asarray(N, dtype=float).reshape(4, 4)
        return cls(A, 0.5 * (n + n.T))


@dataclass(frozen=True)
class MetricFamily:
    """First Taylor coefficient of ``g`` at zero: ``G_{mu nu}`` or ``G^lambda_{alpha beta}``.

    ``G3[l, a, b]`` stores ``G^l_{ab}``.
    """

    kind: str
    G2: np.ndarray | None = None
    G3: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind == SCALAR:
            if self.G2 is None or self.G3 is not None:
                raise InvalidData("scalar_gPsi families carry G2 only")
            G2 = np.asarray(self.G2, dtype=float)
            if G2.shape != (4, 4) or not _symmetric(G2, (0, 1)):
                raise InvalidData("G2 must be a symmetric 4x4 array")
            object.__setattr__(self, "G2", G2)
        elif self.kind == SYSTEM:
            if self.G3 is None or self.G2 is not None:
                raise InvalidData("system_gdPhi families carry G3 only")
            G3 = np.asarray(self.G3, dtype=float)
            if G3.shape != (4, 4, 4) or not _symmetric(G3, (1, 2)):
                raise InvalidData("G3 must be 4x4x4 and symmetric in its last two indices")
            object.__setattr__(self, "G3", G3)
        else:
            raise InvalidData(f"unknown metric family kind {self.kind!r}")

    @classmethod
    def scalar(cls, G2) -> MetricFamily:
        g = np.asarray(G2, dtype=float).reshape(4, 4)
        return cls(SCALAR, G2=0.5 * (g + g.T))

    @classmethod
    def system(cls, G3) -> MetricFamily:
        g = np.asarray(G3, dtype=float).reshape(4, 4, 4)
        return cls(SYSTEM, G3=0.5 * (g + g.transpose(0, 2, 1)))


# worked families
def john_metric() -> MetricFamily:
    """``g = -dt^2 + (1 + Psi)^{-1} sum (dx^a)^2``."""
    return MetricFamily.scalar(np.diag([0.0, -1.0, -1.0, -1.0]))


def conformal_metric(c: float = 1.0) -> MetricFamily:
    """``g = (1 + f(Psi)) m`` with ``f'(0) = c``."""
    return MetricFamily.scalar(c * MINKOWSKI)


def off_diagonal_metric() -> MetricFamily:
    """``g = m + Psi (dx^1 dx^2 + dx^2 dx^1)``."""
    G = np.zeros((4, 4))
    G[1, 2] = G[2, 1] = 1.0
    return MetricFamily.scalar(G)


def divergence_source_family() -> MetricFamily:
    """Source ``d_t((m^{-1})^{ab} d_a Phi d_b Phi)``: ``G^l_{ab} = 2 delta^l_a m_{b0}``."""
    G = np.zeros((4, 4, 4))
    for lam in range(4):
        G[lam, lam, :] += 2.0 * MINKOWSKI[:, 0]
    return MetricFamily(SYSTEM, G3=0.5 * (G + G.transpose(0, 2, 1)))


def time_derivative_source_family() -> MetricFamily:
    """Source ``2 d_t Phi d_t^2 Phi``: ``G^l_{ab} = m_{a0} m_{b0} delta^l_0``."""
    G = np.zeros((4, 4, 4))
    G[0] = np.outer(MINKOWSKI[:, 0], MINKOWSKI[:, 0])
    return MetricFamily(SYSTEM, G3=G)


BUILTIN_METRICS: dict[str, Callable[[], MetricFamily]] = {
    "john": john_metric,
    "conformal": conformal_metric,
    "off_diagonal": off_diagonal_metric,
    "divergence_source": divergence_source_family,
    "time_derivative_source": time_derivative_source_family,
}


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` nearly uniform unit vectors (golden-angle spiral)."""
    if n < 1:
        raise InvalidData("need at least one direction")
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    pts = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


@dataclass(frozen=True)
class NullDirection:
    theta: np.ndarray
    L_flat: np.ndarray = field(init=False)
    # Minkowski-null covectors (l0, theta) with l0 = -1 and l0 = +1
    covectors: tuple[np.ndarray, np.ndarray] = field(init=False)

    def __post_init__(self) -> None:
        th = np.asarray(self.theta, dtype=float)
        if th.shape != (3,) or abs(np.linalg.norm(th) - 1.0) > 1e-14:
            raise InvalidData("theta must be a unit 3-vector")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "L_flat", np.concatenate([[1.0], th]))
        object.__setattr__(
            self, "covectors", (np.concatenate([[-1.0], th]), np.concatenate([[1.0], th]))
        )


@dataclass(frozen=True)
class NullCheck:
    passes: bool
    max_violation: float
    witness: NullDirection


def null_violation(nl: QuadraticNonlinearity, covectors: np.ndarray) -> np.ndarray:
    """``|A l l l| + |N l l|`` for each row of ``covectors``."""
    cubic = np.einsum("ijk,ni,nj,nk->n", nl.A, covectors, covectors, covectors)
    quad = np.einsum("ij,ni,nj->n", nl.N, covectors, covectors)
    return np.abs(cubic) + np.abs(quad)


def check_classic_null(
    nl: QuadraticNonlinearity, n_dirs: int = DEFAULT_DIRECTIONS, scale: float = 1.0
) -> NullCheck:
    """Test the classic null condition on ``scale * (l0, theta)``, ``l0 = +-1``."""
    if n_dirs < 6:
        raise InvalidData("n_dirs must be at least 6")
    dirs = fibonacci_sphere(n_dirs)
    best, arg = -1.0, 0
    for l0 in (-1.0, 1.0):
        cov = scale * np.column_stack([np.full(n_dirs, l0), dirs])
        v = null_violation(nl, cov)
        k = int(np.argmax(v))
        if v[k] > best:
            best, arg = float(v[k]), k
    return NullCheck(best <= NULL_TOL * max(1.0, abs(scale)) ** 3, best, NullDirection(dirs[arg]))


def _frame(theta, t_sign: float) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    lead = np.full(th.shape[:-1] + (1,), t_sign)
    return np.concatenate([lead, th], axis=-1)


def _scalar_contraction(mf: MetricFamily, theta, t_sign: float):
    L = _frame(theta, t_sign)
    out = np.einsum("ab,...a,...b->...", mf.G2, L, L)
    return float(out) if np.ndim(out) == 0 else out


def _system_contraction(mf: MetricFamily, theta, t_sign: float):
    L = _frame(theta, t_sign)
    lowered = np.einsum("kl,...l->...k", MINKOWSKI, L)
    out = SYSTEM_SIGN * np.einsum("kab,...a,...b,...k->...", mf.G3, L, L, lowered)
    return float(out) if np.ndim(out) == 0 else out


def aleph_plus_scalar(mf: MetricFamily, theta):
    """``G_{ab} L^a L^b`` with ``L = (1, theta)``."""
    if mf.kind != SCALAR:
        raise WrongKind("aleph_plus_scalar needs a scalar_gPsi family")
    return _scalar_contraction(mf, theta, 1.0)


def aleph_plus_system(mf: MetricFamily, theta):
    """Cubic contraction of ``G^k_{ab}`` with ``L = (1, theta)``, lowered once by ``m``."""
    if mf.kind != SYSTEM:
        raise WrongKind("aleph_plus_system needs a system_gdPhi family")
    return _system_contraction(mf, theta, 1.0)


def aleph_plus(mf: MetricFamily, theta):
    if mf.kind == SCALAR:
        return aleph_plus_scalar(mf, theta)
    return aleph_plus_system(mf, theta)


def aleph_minus(mf: MetricFamily, theta):
    """Same contraction with the incoming frame ``(-1, theta)``."""
    if mf.kind == SCALAR:
        return _scalar_contraction(mf, theta, -1.0)
    return _system_contraction(mf, theta, -1.0)


def induced_nonlinearity(mf: MetricFamily) -> QuadraticNonlinearity:
    """Quadratic coefficients of ``(g^{-1})^{ab} d_a d_b Phi`` expanded at zero.

    ``d(g^{-1}) = -m^{-1} G m^{-1}``. Scalar families give a two-tensor
    ``A'^{ab}``, lifted as ``A^{ab s} = A'^{ab} delta^s_0`` (``|l_0| = 1`` on
    the sampled covectors). On ``l = (-1, theta)`` the null contraction equals
    the outgoing failure factor in both cases.
    """
    minv = np.linalg.inv(MINKOWSKI)
    if mf.kind == SCALAR:
        return QuadraticNonlinearity.from_scalar_coefficient(-minv @ mf.G2 @ minv)
    A = -np.einsum("ai,bj,lij->abl", minv, minv, mf.G3)
    return QuadraticNonlinearity(0.5 * (A + A.transpose(1, 0, 2)), np.zeros((4, 4)))


# ---------------------------------------------------------------- fluids

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FluidLagrangian:
    """``L(sigma)`` with derivatives; ``derivatives`` holds ``(L', L'', L''')`` when analytic.

    Finite-difference mode uses fourth-order central stencils. With ``h`` unset
    the step for the ``n``-th derivative is ``max(1, k^2) * eps**(1/(4+n))``,
    which balances truncation against rounding.
    """

    L: Callable
    k: float
    derivatives: tuple[Callable, Callable, Callable] | None = None
    h: float | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.k == 0.0:
            raise InvalidData("background constant k must be nonzero")

    @property
    def derivative_mode(self) -> str:
        return "analytic" if self.derivatives is not None else "finite-difference"

    def step(self, order: int) -> float:
        if self.h is not None:
            return self.h
        return max(1.0, self.k**2) * EPS ** (1.0 / (4 + order))

    def deriv(self, order: int, sigma):
        sigma = np.asarray(sigma, dtype=float)
        if order == 0:
            return self.L(sigma)
        if self.derivatives is not None:
            return self.derivatives[order - 1](sigma)
        return _fd(self.L, order, sigma, self.step(order))


# fourth-order central stencils: offsets and weights (divide by h**order)
_STENCILS = {
    1: (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0),
    2: (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12.0),
    3: (np.array([-3, -2, -1, 1, 2, 3]), np.array([1, -8, 13, -13, 8, -1]) / 8.0),
}


def _fd(f, order: int, x, h: float):
    offs, w = _STENCILS[order]
    pts = x[..., None] + offs * h
    with np.errstate(all="ignore"):
        vals = f(pts)
    if not np.all(np.isfinite(vals)):
        raise NotDifferentiable(f"stencil for derivative {order} leaves the domain of L")
    return np.sum(vals * w, axis=-1) / h**order


@dataclass(frozen=True)
class FluidDerived:
    G: Callable
    F: Callable
    H: Callable
    eta: Callable
    alpha_inputs: dict[str, float]
    dHdsigma_at_k2: float
    positivity_ok: bool
    eta_at_k2: float


def fluid_derived(fl: FluidLagrangian) -> FluidDerived:
    """``G = 2L'``, ``F = 2G'/G``, ``H = F/(1 + sigma F)``, ``eta^2 = 1 - sigma H``."""

    def G(s):
        return 2.0 * fl.deriv(1, s)

    def F(s):
        return 2.0 * fl.deriv(2, s) / fl.deriv(1, s)

    def H(s):
        f = F(s)
        return f / (1.0 + np.asarray(s, dtype=float) * f)

    def eta(s):
        e2 = 1.0 - np.asarray(s, dtype=float) * H(s)
        if np.any(e2 <= 0.0):
            raise DegenerateSound("eta^2 = 1 - sigma H <= 0")
        return np.sqrt(e2)

    s0 = fl.k**2
    with np.errstate(all="ignore"):
        L0, L1, L2, L3 = (float(fl.deriv(n, s0)) for n in range(4))
    if not all(math.isfinite(v) for v in (L0, L1, L2, L3)) or L1 == 0.0:
        raise NotDifferentiable("L is not twice differentiable with L' != 0 at sigma = k^2")
    f0 = 2.0 * L2 / L1
    df0 = 2.0 * (L3 * L1 - L2 * L2) / (L1 * L1)
    dH = (df0 - f0 * f0) / (1.0 + s0 * f0) ** 2
    inputs = {
        "sigma": s0,
        "L": L0,
        "dL": L1,
        "d_L_over_sqrt_sigma": L1 / math.sqrt(s0) - 0.5 * L0 / s0**1.5,
        "d2L": L2,
    }
    positivity = all(v > 0.0 for v in inputs.values())
    eta0 = float(eta(s0))
    if positivity and not 0.0 < eta0 < 1.0:
        raise DegenerateSound(f"eta = {eta0} outside (0, 1) despite positivity")
    return FluidDerived(G, F, H, eta, inputs, float(dH), positivity, eta0)


def is_exceptional(fl: FluidLagrangian, tol: float = 1.0e-10) -> bool:
    return abs(fluid_derived(fl).dHdsigma_at_k2) <= tol


def exceptional_lagrangian(k: float, scale: float = 1.0, analytic: bool = True) -> FluidLagrangian:
    """``scale * (1 - sqrt(1 - sigma))``."""

    def L(s):
        return scale * (1.0 - np.sqrt(1.0 - s))

    ders = (
        lambda s: scale * 0.5 * (1.0 - s) ** -0.5,
        lambda s: scale * 0.25 * (1.0 - s) ** -1.5,
        lambda s: scale * 0.375 * (1.0 - s) ** -2.5,
    )
    return FluidLagrangian(L, k, ders if analytic else None, name="exceptional")


def quadratic_lagrangian(k: float, a: float = 1.0, b: float = 1.0, analytic: bool = True) -> FluidLagrangian:
    """``a sigma + b sigma^2``; ``b = 0`` is the linear (free-wave) case."""

    def L(s):
        return a * s + b * s * s

    ders = (
        lambda s: a + 2.0 * b * s,
        lambda s: 2.0 * b + 0.0 * s,
        lambda s: 0.0 * s,
    )
    return FluidLagrangian(L, k, ders if analytic else None, name="quadratic")


def linear_lagrangian(k: float, analytic: bool = True) -> FluidLagrangian:
    fl = quadratic_lagrangian(k, 1.0, 0.0, analytic)
    return FluidLagrangian(fl.L, k, fl.derivatives, name="linear")


def lagrangian_from_spec(spec: str, k: float, analytic: bool = True) -> FluidLagrangian:
    """``exceptional[:scale]``, ``linear`` or ``quadratic:a,b``."""
    name, _, rest = spec.partition(":")
    params = [float(p) for p in rest.split(",") if p.strip()] if rest else []
    try:
        if name == "exceptional":
            return exceptional_lagrangian(k, *params, analytic=analytic)
        if name == "linear" and not params:
            return linear_lagrangian(k, analytic=analytic)
        if name == "quadratic":
            return quadratic_lagrangian(k, *params, analytic=analytic)
    except TypeError as exc:
        raise InvalidData(f"bad parameters for Lagrangian {spec!r}") from exc
    raise InvalidData(f"unknown Lagrangian {spec!r}")
