from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from shocklab import nullcond as nc
from shocklab import radiation as rad
from shocklab.errors import InvalidData, QuadratureFailure
from shocklab.john import radial
from shocklab.profiles import cinf_bump, poly_bump

THETAS = nc.fibonacci_sphere(7)


def _unstructured(f: rad.SpatialField) -> rad.SpatialField:
    """Same field without its bump decomposition, forcing plane quadrature."""
    return rad.SpatialField(f.eval, f.support_radius, f.gradient)


@pytest.mark.parametrize("q", [0.0, 0.3, -0.7, 0.95])
def test_ball_indicator_slices(q):
    for th in THETAS:
        assert rad.radon(rad.ball_indicator(1.0), q, th) == pytest.approx(
            math.pi * (1 - q * q), abs=1e-6
        )


@pytest.mark.parametrize("q", [0.0, 0.5, -1.5, 2.5])
def test_gaussian_slices(q):
    for th in THETAS:
        assert rad.radon(rad.gaussian_field(), q, th) == pytest.approx(
            math.pi * math.exp(-q * q), abs=1e-6
        )


def test_structured_and_plane_quadrature_agree():
    f = rad.from_bumps(
        [
            rad.RadialBump(poly_bump(1, 4, 0.4), (0.2, -0.1, 0.3), 0.7),
            rad.RadialBump(cinf_bump(1, 0.3), (-0.4, 0.2, 0.0), -1.2),
        ]
    )
    g = _unstructured(f)
    for th in THETAS:
        for q in (-0.5, -0.1, 0.2, 0.45):
            assert rad.radon(f, q, th) == pytest.approx(rad.radon(g, q, th), abs=1e-8)


def test_radon_dq_paths_agree():
    f = rad.from_bumps([rad.RadialBump(poly_bump(1, 4, 0.4), (0.2, -0.1, 0.3), 0.7)])
    th = THETAS[2]
    for q in (-0.3, 0.1, 0.4):
        exact = rad.radon_dq(f, q, th)
        via_gradient = rad.radon_dq(_unstructured(f), q, th)
        no_grad = rad.SpatialField(f.eval, f.support_radius)
        stencil = rad.radon_dq(no_grad, q, th)
        assert via_gradient == pytest.approx(exact, abs=1e-6)
        assert stencil == pytest.approx(exact, abs=1e-6)


def test_friedlander_matches_late_time_linear_wave():
    # exact for t >= R: r Phi(t, q + t) = F(q) for the linear wave
    lam, R, t = 1e-7, 0.5, 1.0
    g = poly_bump(1.0, 3, R)
    f = cinf_bump(1.0, R)
    sl = radial.evolve(lambda r: lam * g(r), lambda r: lam * f(r), t, n=1600)
    phi0 = rad.radial_field(g)
    phi0_dot = rad.radial_field(f)
    th = np.array([0.0, 0.0, 1.0])
    for q in np.linspace(-0.45, 0.45, 10):
        r = t + q
        assert sl.psi(r) * r / lam == pytest.approx(rad.friedlander(phi0, phi0_dot, q, th), abs=1e-7)


def test_friedlander_closed_form_radial():
    f = poly_bump(1.0, 4, 0.5)
    th = np.array([0.6, 0.0, 0.8])
    for q in (-0.3, 0.0, 0.2):
        expected = 0.5 * quad(lambda s: s * f(s), abs(q), 0.5)[0]
        val = rad.friedlander(rad.zero_field(), rad.radial_field(f), q, th)
        assert val == pytest.approx(expected, abs=1e-12)


def test_radiation_field_vanishes_outside_support():
    rf = rad.radiation_field(rad.zero_field(), rad.radial_field(poly_bump(1, 4, 0.5)), 65, 16)
    assert np.all(rf.values[0] == 0.0) and np.all(rf.values[-1] == 0.0)
    assert rf.d2q.shape == (61, 16)


def test_john_hormander_sup_radial_closed_form():
    # aleph = -1: sup of (f + q f') / 4, which is f(0) / 4 for poly_bump
    est = rad.john_hormander_sup(
        rad.zero_field(),
        rad.radial_field(poly_bump(1.0, 4, 0.5)),
        lambda th: nc.aleph_plus(nc.john_metric(), th),
        n_q=257,
        n_dirs=64,
    )
    assert est.sup_value == pytest.approx(0.25, abs=1e-6)
    assert est.log_lifespan_bound(0.1) == pytest.approx(1 / (0.1 * est.sup_value))


def test_zero_data_sup_is_zero():
    est = rad.john_hormander_sup(rad.zero_field(), rad.zero_field(), lambda th: 1.0, 33, 8)
    assert est.sup_value == 0.0 and est.lifespan_bound(0.1) == math.inf


def test_christodoulou_constant_data_closed_form():
    c, k, U = 0.8, 0.3, 0.25
    r0 = 1 - U
    expected = 4 * math.pi * (c - k) * (r0**3 + 2 * (1 - r0**3) / 3)
    S = rad.christodoulou_S(rad.zero_field(), rad.from_bumps([], constant=c), k, 0.5, U)
    assert S == pytest.approx(expected, rel=1e-12)


def test_christodoulou_criterion_signs():
    assert rad.christodoulou_criterion(-1.0, 2.0).shock_indicated
    assert not rad.christodoulou_criterion(1.0, 2.0).shock_indicated
    assert not rad.christodoulou_criterion(-1.0, 0.0).shock_indicated


def test_input_validation():
    with pytest.raises(InvalidData):
        rad.radon(rad.ball_indicator(1.0), 0.0, (1.0, 1.0, 0.0))
    with pytest.raises(InvalidData):
        rad.christodoulou_S(rad.zero_field(), rad.zero_field(), 0.1, 0.5, 1.0)


def test_unresolvable_quadrature_raises():
    # a jump across the quadrature disk converges only at first order
    def ev(y):
        return ((y[..., 0] > 0.1) & (np.linalg.norm(y, axis=-1) <= 1.0)).astype(float)

    with pytest.raises(QuadratureFailure) as info:
        rad.radon(rad.SpatialField(ev, 1.0), 0.0, np.array([0.0, 0.0, 1.0]), tol=1e-12)
    assert info.value.exit_code == 4


def test_random_pairs_are_seeded():
    a = rad.random_bump_pairs(3, seed=11)
    b = rad.random_bump_pairs(3, seed=11)
    y = np.random.default_rng(0).normal(size=(20, 3)) * 0.5
    for (p, q), (r, s) in zip(a, b):
        np.testing.assert_array_equal(p(y), r(y))
        np.testing.assert_array_equal(q(y), s(y))
