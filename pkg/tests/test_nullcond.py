from __future__ import annotations

import numpy as np
import pytest

from shocklab import nullcond as nc
from shocklab.errors import DegenerateSound, InvalidData, NotDifferentiable, WrongKind

DIRS = nc.fibonacci_sphere(4096)
# closed under antipodes, so ranges over the sample are exact
SYM_DIRS = np.concatenate([DIRS, -DIRS])


def test_fibonacci_sphere_is_unit_and_balanced():
    assert np.allclose(np.linalg.norm(DIRS, axis=1), 1.0, atol=1e-15)
    assert np.all(np.abs(DIRS.mean(axis=0)) < 1e-3)


@pytest.mark.parametrize(
    "family, expected",
    [
        (nc.john_metric, lambda th: -np.ones(len(th))),
        (lambda: nc.conformal_metric(2.5), lambda th: np.zeros(len(th))),
        (nc.off_diagonal_metric, lambda th: 2 * th[:, 0] * th[:, 1]),
        (nc.divergence_source_family, lambda th: np.zeros(len(th))),
        (nc.time_derivative_source_family, lambda th: np.ones(len(th))),
    ],
)
def test_aleph_plus_worked_values(family, expected):
    vals = nc.aleph_plus(family(), DIRS)
    assert np.max(np.abs(vals - expected(DIRS))) <= 1e-12


def test_aleph_minus_worked_values():
    assert np.max(np.abs(nc.aleph_minus(nc.john_metric(), DIRS) + 1)) <= 1e-12
    assert np.max(np.abs(nc.aleph_minus(nc.conformal_metric(), DIRS))) <= 1e-12
    assert np.max(np.abs(nc.aleph_minus(nc.time_derivative_source_family(), DIRS) + 1)) <= 1e-12


def _random_family(rng, kind):
    if kind == nc.SCALAR:
        return nc.MetricFamily.scalar(rng.normal(size=16))
    return nc.MetricFamily.system(rng.normal(size=64))


@pytest.mark.parametrize("kind", [nc.SCALAR, nc.SYSTEM])
def test_range_identity(kind):
    # quadratic in the frame for scalar families, cubic for systems:
    # aleph_minus(theta) = (+1 or -1) * aleph_plus(-theta)
    rng = np.random.default_rng(3)
    sign = 1.0 if kind == nc.SCALAR else -1.0
    for _ in range(5):
        mf = _random_family(rng, kind)
        plus = nc.aleph_plus(mf, SYM_DIRS)
        minus = sign * nc.aleph_minus(mf, SYM_DIRS)
        assert abs(plus.min() - minus.min()) <= 1e-12 * max(1, abs(plus.min()))
        assert abs(plus.max() - minus.max()) <= 1e-12 * max(1, abs(plus.max()))


def test_aleph_equals_null_contraction_of_induced_tensor():
    rng = np.random.default_rng(5)
    cov = np.column_stack([-np.ones(len(DIRS)), DIRS])
    for kind in (nc.SCALAR, nc.SYSTEM):
        mf = _random_family(rng, kind)
        nl = nc.induced_nonlinearity(mf)
        contraction = np.einsum("ijk,ni,nj,nk->n", nl.A, cov, cov, cov)
        np.testing.assert_allclose(contraction, nc.aleph_plus(mf, DIRS), atol=1e-12)


@pytest.mark.parametrize("name", sorted(nc.BUILTIN_METRICS))
def test_null_condition_iff_aleph_vanishes(name):
    mf = nc.BUILTIN_METRICS[name]()
    big = nc.fibonacci_sphere(1_000_000)
    vanishes = np.max(np.abs(nc.aleph_plus(mf, big))) <= nc.NULL_TOL
    assert nc.check_classic_null(nc.induced_nonlinearity(mf)).passes == vanishes


def test_classic_null_forms():
    m = nc.MINKOWSKI
    # m^{ab} d_a Phi d_b Phi is null; (d_t Phi)^2 is not
    assert nc.check_classic_null(nc.QuadraticNonlinearity.from_flat(N=np.linalg.inv(m))).passes
    N = np.zeros((4, 4))
    N[0, 0] = 1.0
    chk = nc.check_classic_null(nc.QuadraticNonlinearity.from_flat(N=N))
    assert not chk.passes and chk.max_violation == pytest.approx(1.0)


def test_kind_and_shape_validation():
    with pytest.raises(WrongKind):
        nc.aleph_plus_scalar(nc.time_derivative_source_family(), DIRS[0])
    with pytest.raises(WrongKind):
        nc.aleph_plus_system(nc.john_metric(), DIRS[0])
    with pytest.raises(InvalidData):
        nc.MetricFamily("scalar_gPsi", G2=np.arange(16.0).reshape(4, 4))
    with pytest.raises(InvalidData):
        nc.QuadraticNonlinearity(np.zeros((4, 4, 3)), np.zeros((4, 4)))
    with pytest.raises(InvalidData):
        nc.NullDirection(np.array([1.0, 1.0, 0.0]))


@pytest.mark.parametrize("k", [0.3, 0.5, 0.9])
def test_exceptional_lagrangian(k):
    fd = nc.fluid_derived(nc.exceptional_lagrangian(k))
    assert abs(fd.dHdsigma_at_k2) <= 1e-10
    assert fd.positivity_ok
    assert fd.eta_at_k2 == pytest.approx(np.sqrt(1 - k * k), rel=1e-12)


def test_exceptional_scale_invariance():
    for s in (0.5, 3.0):
        assert nc.is_exceptional(nc.exceptional_lagrangian(0.4, scale=s))


def test_quadratic_lagrangian_symbolic_chain():
    # L = s + s^2: F = 4/(1+2s), F' = -8/(1+2s)^2, H' = (F' - F^2)/(1+sF)^2
    s = 0.01
    F = 4 / (1 + 2 * s)
    dF = -8 / (1 + 2 * s) ** 2
    expected = (dF - F * F) / (1 + s * F) ** 2
    fd = nc.fluid_derived(nc.quadratic_lagrangian(0.1))
    assert fd.dHdsigma_at_k2 == pytest.approx(expected, rel=1e-12)
    assert fd.dHdsigma_at_k2 == pytest.approx(-21.36, abs=0.01)


def test_linear_lagrangian_is_exceptional():
    # free waves: F = 0 identically
    fd = nc.fluid_derived(nc.linear_lagrangian(0.5))
    assert fd.dHdsigma_at_k2 == 0.0 and fd.eta_at_k2 == 1.0


@pytest.mark.parametrize("spec", ["exceptional", "quadratic:1,1", "quadratic:2,0.5"])
def test_fd_mode_matches_analytic(spec):
    for k in (0.3, 0.7):
        a = nc.fluid_derived(nc.lagrangian_from_spec(spec, k, analytic=True))
        f = nc.fluid_derived(nc.lagrangian_from_spec(spec, k, analytic=False))
        s = np.linspace(0.05, 0.5, 7)
        np.testing.assert_allclose(f.H(s), a.H(s), rtol=1e-8, atol=1e-8)
        assert abs(f.dHdsigma_at_k2 - a.dHdsigma_at_k2) < 1e-4 * max(1, abs(a.dHdsigma_at_k2))


def test_chain_H_matches_closed_form_differences():
    fl = nc.quadratic_lagrangian(0.4, 1.0, 0.7)
    fd = nc.fluid_derived(fl)
    s = np.linspace(0.05, 0.6, 12)
    h = 1e-4
    G = lambda x: 2 * (1.0 + 1.4 * x)  # 2 L'
    F = lambda x: 2 * (G(x + h) - G(x - h)) / (2 * h) / G(x)
    np.testing.assert_allclose(fd.H(s), F(s) / (1 + s * F(s)), rtol=1e-8)


def test_fluid_errors():
    with pytest.raises(InvalidData):
        nc.lagrangian_from_spec("cubic", 0.5)
    with pytest.raises(InvalidData):
        nc.exceptional_lagrangian(0.0)
    with pytest.raises(NotDifferentiable):
        nc.fluid_derived(nc.exceptional_lagrangian(1.0))
    # L = s - s^2 at s = 0.49: eta^2 = 1 - s H < 0
    with pytest.raises(DegenerateSound):
        nc.fluid_derived(nc.quadratic_lagrangian(0.7, 1.0, -0.9)).eta(0.49)
