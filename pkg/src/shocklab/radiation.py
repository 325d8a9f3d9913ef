"""Radon transforms, Friedlander's radiation field and lifespan predictors.

For data ``(Phi0, Phi0_dot)`` of the linear wave equation on R^3 the
radiation field is

    F(q, theta) = -(1/4 pi) d_q R[Phi0](q, theta) + (1/4 pi) R[Phi0_dot](q, theta),

where ``R[f](q, theta)`` integrates ``f`` over the plane ``{y . theta = q}``.
Fields built from radial bumps carry their structure, so their transforms
reduce to one-dimensional integrals; other fields use plane quadrature.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from shocklab.errors import InvalidData, QuadratureFailure
from shocklab.nullcond import fibonacci_sphere
from shocklab.profiles import Profile1D, cinf_bump, poly_bump

N_RADIAL = 64
N_ANGULAR = 128
N_Q = 513
N_DIRECTIONS = 1024
RADON_TOL = 1.0e-8
MAX_REFINEMENTS = 3
POSITIVITY_FLOOR = 1.0e-10
# plane radius used for fields without compact support
DEFAULT_EXTENT = 9.0
FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class RadialBump:
    """``amplitude * profile(|y - center|)``, vanishing for ``|y - center| > profile.support_radius``."""

    profile: Profile1D
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.profile.support_radius):
            raise InvalidData("bump profiles need a finite support radius")

    @property
    def radius(self) -> float:
        return self.profile.support_radius

    def value(self, y: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(y - np.asarray(self.center), axis=-1)
        inside = d <= self.radius
        return np.where(inside, self.amplitude * self.profile(np.where(inside, d, 0.0)), 0.0)

    def gradient(self, y: np.ndarray) -> np.ndarray:
        diff = y - np.asarray(self.center)
        d = np.linalg.norm(diff, axis=-1)
        inside = (d <= self.radius) & (d > 0.0)
        safe = np.where(inside, d, 1.0)
        slope = np.where(inside, self.amplitude * self.profile.d(safe) / safe, 0.0)
        return slope[..., None] * diff


@dataclass(frozen=True)
class SpatialField:
    """A function on R^3 vanishing outside the ball of ``support_radius``.

    ``eval`` and ``gradient`` map arrays of shape ``(..., 3)`` to ``(...)``
    and ``(..., 3)``. When ``decomposed`` is set the field is exactly
    ``constant + sum(bumps)``.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    bumps: tuple[RadialBump, ...] = ()
    constant: float = 0.0
    extent: float = DEFAULT_EXTENT
    decomposed: bool = False

    def __call__(self, y) -> np.ndarray:
        return self.eval(np.asarray(y, dtype=float))

    @property
    def plane_radius(self) -> float:
        return self.support_radius if math.isfinite(self.support_radius) else self.extent

    @property
    def structured(self) -> bool:
        """Exact sum of bumps with compact support."""
        return self.decomposed and self.constant == 0.0

    @property
    def is_zero(self) -> bool:
        return self.decomposed and not self.bumps and self.constant == 0.0

    @property
    def is_radial(self) -> bool:
        return self.decomposed and all(not np.any(b.center) for b in self.bumps)

    def scaled(self, factor: float) -> SpatialField:
        if self.decomposed:
            return from_bumps(
                [RadialBump(b.profile, b.center, factor * b.amplitude) for b in self.bumps],
                constant=factor * self.constant,
            )
        grad = self.gradient
        return SpatialField(
            lambda y: factor * self.eval(y),
            self.support_radius,
            None if grad is None else (lambda y: factor * grad(y)),
            extent=self.extent,
        )


def from_bumps(bumps: Sequence[RadialBump], constant: float = 0.0) -> SpatialField:
    bumps = tuple(bumps)

    def ev(y):
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape[:-1], constant)
        for b in bumps:
            out = out + b.value(y)
        return out

    def grad(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape)
        for b in bumps:
            out = out + b.gradient(y)
        return out

    if constant != 0.0:
        support = math.inf
    elif bumps:
        support = max(float(np.linalg.norm(b.center)) + b.radius for b in bumps)
    else:
        support = 1.0
    return SpatialField(ev, support, grad, bumps, float(constant), decomposed=True)


def radial_field(profile: Profile1D, amplitude: float = 1.0) -> SpatialField:
    return from_bumps([RadialBump(profile, (0.0, 0.0, 0.0), amplitude)])


def zero_field() -> SpatialField:
    return from_bumps([])


def ball_indicator(R: float) -> SpatialField:
    def ev(y):
        return (np.linalg.norm(y, axis=-1) <= R).astype(float)

    return SpatialField(ev, R)


def gaussian_field() -> SpatialField:
    """``exp(-|y|^2)``; effectively supported in ``|y| <= DEFAULT_EXTENT``."""

    def ev(y):
        return np.exp(-np.sum(y * y, axis=-1))

    def grad(y):
        return -2.0 * y * ev(y)[..., None]

    return SpatialField(ev, math.inf, grad)


# ---------------------------------------------------------------- transforms


def _unit(theta) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    if th.shape[-1] != 3 or np.any(np.abs(np.linalg.norm(th, axis=-1) - 1.0) > 1e-12):
        raise InvalidData("theta must be a unit 3-vector")
    return th


def _plane_basis(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(theta[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(theta, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(theta, e1)


def _gauss(n: int, a, b):
    """Gauss-Legendre nodes/weights mapped to ``[a, b]`` (broadcasting)."""
    x, w = roots_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _plane_integral(f: Callable, q: float, theta: np.ndarray, rho_max: float, nr: int, na: int) -> float:
    e1, e2 = _plane_basis(theta)
    rho, w = _gauss(nr, 0.0, rho_max)
    phi = 2.0 * math.pi * np.arange(na) / na
    dirs = np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2
    pts = q * theta + rho[None, :, None] * dirs[:, None, :]
    vals = f(pts)
    return float(np.sum(vals * (w * rho)[None, :]) * (2.0 * math.pi / na))


def _radial_radon(profile: Profile1D, p, n: int = N_RADIAL) -> np.ndarray:
    """``2 pi int_{|p|}^{R} f(s) s ds``: plane integral of a centred radial bump."""
    p = np.abs(np.asarray(p, dtype=float))
    R = profile.support_radius
    lo = np.minimum(p, R)
    s, w = _gauss(n, lo, R)
    return 2.0 * math.pi * np.sum(profile(s) * s * w, axis=-1)


def _structured_radon(f: SpatialField, q, theta: np.ndarray, n: int = N_RADIAL) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    out = np.zeros(np.broadcast_shapes(q.shape, theta.shape[:-1]))
    for b in f.bumps:
        shift = theta @ np.asarray(b.center)
        out = out + b.amplitude * _radial_radon(b.profile, q - shift, n)
    return out


def _structured_radon_dq(f: SpatialField, q, theta: np.ndarray) -> np.ndarray:
    """``d_q R[f]``; for a centred bump ``d/dp R = -2 pi p f(|p|)``."""
    q = np.asarray(q, dtype=float)
    out = np.zeros(np.broadcast_shapes(q.shape, theta.shape[:-1]))
    for b in f.bumps:
        p = q - theta @ np.asarray(b.center)
        ap = np.abs(p)
        inside = ap <= b.radius
        vals = np.where(inside, b.profile(np.where(inside, ap, 0.0)), 0.0)
        out = out - 2.0 * math.pi * b.amplitude * p * vals
    return out


def radon(
    f: SpatialField,
    q: float,
    theta,
    *,
    n_radial: int = N_RADIAL,
    n_angular: int = N_ANGULAR,
    tol: float = RADON_TOL,
) -> float:
    """Integral of ``f`` over the plane ``{y . theta = q}``.

    Polar Gauss-Legendre x uniform-angle quadrature on the disk where the
    plane meets the support; the rule is doubled until two successive
    values agree to ``tol``.
    """
    theta = _unit(theta)
    q = float(q)
    if f.structured:
        return float(_structured_radon(f, q, theta, n_radial))
    R = f.plane_radius
    if abs(q) >= R:
        return 0.0
    rho_max = math.sqrt(R * R - q * q)
    nr, na = n_radial, n_angular
    prev = _plane_integral(f.eval, q, theta, rho_max, nr, na)
    for _ in range(MAX_REFINEMENTS):
        nr, na = 2 * nr, 2 * na
        cur = _plane_integral(f.eval, q, theta, rho_max, nr, na)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise QuadratureFailure(f"plane quadrature stalled at q = {q}: last change {abs(cur - prev):.3e}")


def radon_dq(f: SpatialField, q: float, theta, h: float | None = None) -> float:
    """``d_q R[f]``: exact for structured fields, ``R[theta . grad f]`` when a
    gradient is known, otherwise a five-point stencil with spacing ``h``."""
    theta = _unit(theta)
    if f.structured:
        return float(_structured_radon_dq(f, float(q), theta))
    if f.gradient is not None:
        g = SpatialField(lambda y: f.gradient(y) @ theta, f.support_radius, extent=f.extent)
        return radon(g, q, theta)
    h = f.plane_radius / 512 if h is None else h
    vals = [radon(f, q + k * h, theta) for k in (-2, -1, 1, 2)]
    return (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)


def friedlander(phi0: SpatialField, phi0_dot: SpatialField, q: float, theta, h: float | None = None) -> float:
    return (-radon_dq(phi0, q, theta, h) + radon(phi0_dot, q, theta)) / FOUR_PI


# ---------------------------------------------------------------- radiation field


@dataclass(frozen=True)
class RadiationField:
    q_grid: np.ndarray
    theta_grid: np.ndarray
    values: np.ndarray  # (n_q, n_theta)
    d2q: np.ndarray  # (n_q - 4, n_theta), rows for q_grid[2:-2]

    @property
    def d2q_grid(self) -> np.ndarray:
        return self.q_grid[2:-2]


def second_difference(values: np.ndarray, h: float) -> np.ndarray:
    """Five-point second derivative along axis 0; two boundary rows dropped each side."""
    v = values
    return (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h * h)


def _field_values(phi0: SpatialField, phi0_dot: SpatialField, q: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """``F`` on the product grid ``q x thetas``."""
    out = np.empty((q.size, thetas.shape[0]))
    block = 64
    for start in range(0, thetas.shape[0], block):
        th = thetas[start:start + block]
        qq = q[:, None]
        part = np.zeros((q.size, th.shape[0]))
        for fld, sign, deriv in ((phi0, -1.0, True), (phi0_dot, 1.0, False)):
            if fld.is_zero:
                continue
            if fld.structured:
                vals = _structured_radon_dq(fld, qq, th) if deriv else _structured_radon(fld, qq, th)
            else:
                fn = radon_dq if deriv else radon
                vals = np.array([[fn(fld, qi, t) for t in th] for qi in q])
            part += sign * vals
        out[:, start:start + block] = part / FOUR_PI
    return out


def data_radius(*fields: SpatialField) -> float:
    radii = [f.plane_radius for f in fields if not f.is_zero]
    return max(radii) if radii else 1.0


def radiation_field(
    phi0: SpatialField,
    phi0_dot: SpatialField,
    n_q: int = N_Q,
    n_dirs: int = N_DIRECTIONS,
    thetas: np.ndarray | None = None,
) -> RadiationField:
    R = data_radius(phi0, phi0_dot)
    q = np.linspace(-R, R, n_q)
    th = fibonacci_sphere(n_dirs) if thetas is None else _unit(thetas)
    values = _field_values(phi0, phi0_dot, q, th)
    return RadiationField(q, th, values, second_difference(values, q[1] - q[0]))


@dataclass(frozen=True)
class LifespanEstimate:
    sup_value: float
    argmax: tuple[float, tuple[float, float, float]]
    coarse_sup: float = field(default=0.0, compare=False)

    def log_lifespan_bound(self, lam: float) -> float:
        """``1 / (lambda sup)``; infinite when the supremum vanishes."""
        if self.sup_value <= 0.0:
            return math.inf
        return 1.0 / (lam * self.sup_value)

    def lifespan_bound(self, lam: float) -> float:
        x = self.log_lifespan_bound(lam)
        return math.exp(x) if x < 709.0 else math.inf


def _tangent_neighbours(theta: np.ndarray, spacing: float) -> np.ndarray:
    e1, e2 = _plane_basis(theta)
    out = [theta]
    for frac in (0.5, 0.25):
        for ang in np.arange(8) * (math.pi / 4):
            v = theta + frac * spacing * (math.cos(ang) * e1 + math.sin(ang) * e2)
            out.append(v / np.linalg.norm(v))
    return np.array(out)


def _half_aleph(aleph, thetas: np.ndarray) -> np.ndarray:
    vals = np.asarray(aleph(thetas), dtype=float)
    return 0.5 * np.broadcast_to(vals, (thetas.shape[0],))


def john_hormander_sup(
    phi0: SpatialField,
    phi0_dot: SpatialField,
    aleph: Callable[[np.ndarray], np.ndarray],
    n_q: int = N_Q,
    n_dirs: int = N_DIRECTIONS,
) -> LifespanEstimate:
    """``sup 1/2 aleph(theta) d_q^2 F(q, theta)`` over the grid, refined once at the argmax."""
    rf = radiation_field(phi0, phi0_dot, n_q, n_dirs)
    target = rf.d2q * _half_aleph(aleph, rf.theta_grid)[None, :]
    i, j = np.unravel_index(int(np.argmax(target)), target.shape)
    coarse = float(target[i, j])
    q_star, th_star = float(rf.d2q_grid[i]), rf.theta_grid[j]
    if not np.any(rf.values != 0.0):
        return LifespanEstimate(0.0, (q_star, tuple(float(x) for x in th_star)), 0.0)

    # local pass: 8x finer in q, half and quarter lattice spacing in theta
    dq = rf.q_grid[1] - rf.q_grid[0]
    h = dq / 8
    q_loc = q_star + h * np.arange(-18, 19)
    th_loc = _tangent_neighbours(th_star, math.sqrt(4 * math.pi / rf.theta_grid.shape[0]))
    vals = _field_values(phi0, phi0_dot, q_loc, th_loc)
    fine = second_difference(vals, h) * _half_aleph(aleph, th_loc)[None, :]
    a, b = np.unravel_index(int(np.argmax(fine)), fine.shape)
    if fine[a, b] > coarse:
        best, q_star, th_star = float(fine[a, b]), float(q_loc[2 + a]), th_loc[b]
    else:
        best = coarse
    return LifespanEstimate(max(best, 0.0), (q_star, tuple(float(x) for x in th_star)), coarse)


def positivity_check(
    phi0: SpatialField, phi0_dot: SpatialField, aleph, n_q: int = N_Q, n_dirs: int = N_DIRECTIONS
) -> bool:
    return john_hormander_sup(phi0, phi0_dot, aleph, n_q, n_dirs).sup_value > POSITIVITY_FLOOR


def random_bump_field(rng: np.random.Generator, max_bumps: int = 3, nonnegative: bool = False) -> SpatialField:
    """Sum of 1 to ``max_bumps`` radial bumps inside the unit ball."""
    bumps = []
    for _ in range(int(rng.integers(1, max_bumps + 1))):
        radius = float(rng.uniform(0.2, 0.5))
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        center = direction * rng.uniform(0.0, 1.0 - radius)
        amp = float(rng.uniform(0.2, 1.0))
        if not nonnegative and rng.random() < 0.5:
            amp = -amp
        prof = poly_bump(1.0, int(rng.integers(3, 6)), radius) if rng.random() < 0.5 else cinf_bump(1.0, radius)
        bumps.append(RadialBump(prof, tuple(float(c) for c in center), amp))
    return from_bumps(bumps)


def random_bump_pairs(n: int, seed: int) -> list[tuple[SpatialField, SpatialField]]:
    rng = np.random.default_rng(seed)
    return [(random_bump_field(rng), random_bump_field(rng)) for _ in range(n)]


# ---------------------------------------------------------------- Christodoulou functional


def _radial_derivative(f: SpatialField, y: np.ndarray, h: float = 1.0e-5) -> np.ndarray:
    r = np.linalg.norm(y, axis=-1, keepdims=True)
    unit = y / r
    if f.gradient is not None:
        return np.sum(f.gradient(y) * unit, axis=-1)
    return (f(y + h * unit) - f(y - h * unit)) / (2 * h)


def christodoulou_S(
    phi0: SpatialField,
    phi0_dot: SpatialField,
    k: float,
    eta0: float,
    U: float,
    *,
    n_radial: int = N_RADIAL,
    n_dirs: int = N_DIRECTIONS,
) -> float:
    """Sphere term at ``r = 1 - U`` plus annulus term over ``1 - U <= r <= 1``."""
    if not 0.0 < U < 1.0:
        raise InvalidData("U must lie in (0, 1)")
    if not 0.0 < eta0 < 1.0:
        raise InvalidData("eta0 must lie in (0, 1)")
    r0 = 1.0 - U
    if phi0.is_radial and phi0_dot.is_radial:
        dirs = np.array([[0.0, 0.0, 1.0]])
        wdir = np.array([FOUR_PI])
    else:
        dirs = fibonacci_sphere(n_dirs)
        wdir = np.full(n_dirs, FOUR_PI / n_dirs)

    def integrand(r, weight_dot):
        y = r[..., None, None] * dirs
        vals = weight_dot * (phi0_dot(y) - k) - eta0 * _radial_derivative(phi0, y)
        return vals @ wdir

    sphere = r0 * r0 * r0 * float(integrand(np.array([r0]), 1.0)[0])
    s, w = _gauss(n_radial, r0, 1.0)
    volume = float(np.sum(integrand(s, 2.0) * s * s * w))
    total = sphere + volume
    if not math.isfinite(total):
        raise QuadratureFailure("non-finite value in the data functional")
    return total


@dataclass(frozen=True)
class CriterionResult:
    shock_indicated: bool
    note: str


def christodoulou_criterion(S_value: float, ell: float) -> CriterionResult:
    """Sign structure only: a shock is indicated iff ``ell * S < 0``."""
    indicated = (ell > 0.0 and S_value < 0.0) or (ell < 0.0 and S_value > 0.0)
    if ell == 0.0:
        note = "exceptional Lagrangian: criterion does not apply"
    elif S_value == 0.0:
        note = "threshold case: S = 0"
    elif indicated:
        note = "sign condition met; the energy threshold is not evaluated"
    else:
        note = "S has the non-shock-forming sign for this Lagrangian"
    return CriterionResult(indicated, note)
