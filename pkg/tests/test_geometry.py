"""Model manifolds and comparison formulas against high-precision oracles."""

import mpmath
import numpy as np
import pytest

from hjlab.errors import ConfigurationError, DegeneracyError, DomainError
from hjlab.geometry import (
    CurvatureData,
    ModelManifold,
    coth,
    hessian_distance_bound,
    laplacian_distance_bound,
    radial_p_laplacian,
    warping,
)

COTH_1 = 1.3130352854993312  # high-precision coth(1), frozen from mpmath


def test_coth_against_mpmath():
    # covers both the series branch (< 1e-4) and the direct branch
    mpmath.mp.dps = 40
    xs = np.logspace(-8, 0, 200)
    ours = coth(xs)
    ref = np.array([float(mpmath.coth(mpmath.mpf(float(x)))) for x in xs])
    assert np.max(np.abs(ours - ref) / ref) < 1e-12


def test_coth_value():
    assert coth(1.0) == pytest.approx(COTH_1, rel=1e-14)
    assert coth(2.0) == pytest.approx(float(mpmath.coth(2)), rel=1e-13)


def test_coth_domain():
    with pytest.raises(DomainError):
        coth(0.0)
    with pytest.raises(DomainError):
        coth(-1.0)


class TestWarping:
    def test_euclidean(self):
        m = ModelManifold("euclidean", 3)
        assert warping(m, 2.0) == (2.0, 1.0, 0.5)

    def test_hyperbolic_small_r(self):
        # f'/f -> 1/r as r -> 0
        m = ModelManifold("hyperbolic", 3, 1.0)
        _, _, fpf = warping(m, 1e-6)
        assert abs(fpf - 1e6) < 1.0

    def test_hyperbolic_r1(self):
        m = ModelManifold("hyperbolic", 2, 1.0)
        f, fp, fpf = warping(m, 1.0)
        assert fpf == pytest.approx(COTH_1, rel=1e-13)
        assert f == pytest.approx(np.sinh(1.0))
        assert fp == pytest.approx(np.cosh(1.0))

    def test_hyperbolic_b0_matches_euclidean(self):
        m0 = ModelManifold("hyperbolic", 3, 0.0)
        me = ModelManifold("euclidean", 3)
        r = np.linspace(0.1, 5.0, 50)
        for a, b in zip(warping(m0, r), warping(me, r)):
            np.testing.assert_allclose(a, b, rtol=0, atol=0)

    def test_log_model_rejected(self):
        with pytest.raises(ConfigurationError):
            warping(ModelManifold("log_model", 2, 1.0), 1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            warping(ModelManifold("euclidean", 2), 0.0)


class TestManifoldValidation:
    def test_dimension(self):
        with pytest.raises(DomainError):
            ModelManifold("euclidean", 1)

    def test_negative_curvature_scale(self):
        with pytest.raises(DomainError):
            ModelManifold("hyperbolic", 2, -1.0)

    def test_euclidean_needs_b0(self):
        with pytest.raises(ConfigurationError):
            ModelManifold("euclidean", 2, 1.0)

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            ModelManifold("spherical", 2)


class TestLaplacianBound:
    def test_flat_limit(self):
        coth_bound, relaxed = laplacian_distance_bound(3, 0.0, 2.0)
        assert coth_bound == pytest.approx(1.0)
        assert relaxed == pytest.approx(1.0)

    def test_coth_value(self):
        coth_bound, _ = laplacian_distance_bound(2, 1.0, 1.0)
        assert coth_bound == pytest.approx(COTH_1, rel=1e-13)

    def test_relaxed_dominates(self):
        coth_bound, relaxed = laplacian_distance_bound(3, 1.0, 1.0)
        assert relaxed == pytest.approx(4.0)
        assert coth_bound == pytest.approx(2 * COTH_1, rel=1e-13)
        r = np.logspace(-6, 2, 400)
        for B in (0.0, 0.3, 1.0, 5.0):
            cb, rx = laplacian_distance_bound(4, B, r)
            assert np.all(cb <= rx * (1 + 1e-15))

    def test_monotone_and_limit(self):
        # nonincreasing in r, >= (n-1)B, limit (n-1)B
        n, B = 3, 1.5
        r = np.logspace(-4, 2, 500)
        cb, _ = laplacian_distance_bound(n, B, r)
        assert np.all(np.diff(cb) <= 1e-12)
        assert np.all(cb >= (n - 1) * B - 1e-12)
        assert cb[-1] == pytest.approx((n - 1) * B, rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            laplacian_distance_bound(3, 1.0, 0.0)


class TestHessianBound:
    def test_flat(self):
        cb, _ = hessian_distance_bound(0.0, 0.5)
        assert cb == pytest.approx(2.0)

    def test_s1(self):
        cb, _ = hessian_distance_bound(1.0, 1.0)
        assert cb == pytest.approx(COTH_1, rel=1e-13)

    def test_s2_and_relaxed(self):
        cb, relaxed = hessian_distance_bound(2.0, 1.0)
        assert cb == pytest.approx(2 * float(mpmath.coth(2)), rel=1e-13)
        assert relaxed == pytest.approx(6.0)
        assert cb <= relaxed

    def test_domain(self):
        with pytest.raises(DomainError):
            hessian_distance_bound(1.0, -0.5)


class TestRadialPLaplacian:
    def test_flat_r_squared(self):
        # u = r**2 in flat 3-space: Delta u = 6 at any radius
        m = ModelManifold("euclidean", 3)
        for r in (0.3, 1.0, 4.2):
            assert radial_p_laplacian(m, 2.0, r, 2 * r, 2.0) == pytest.approx(6.0)

    def test_log_model_coordinate(self):
        m = ModelManifold("log_model", 2, 1.0)
        assert radial_p_laplacian(m, 2.0, 0.7, 1.0, 0.0) == pytest.approx(1.0)

    def test_hyperbolic_p3(self):
        m = ModelManifold("hyperbolic", 3, 1.0)
        val = radial_p_laplacian(m, 3.0, 1.0, 1.0, 0.0)
        assert val == pytest.approx(2 * COTH_1, rel=1e-12)

    def test_p2_exact_no_abs_factor(self, rng):
        # p = 2 path must be s' + (n-1)(f'/f)s with no |s|**0 evaluation
        m = ModelManifold("hyperbolic", 4, 0.7)
        for _ in range(200):
            r = rng.uniform(0.01, 10)
            s = rng.normal()
            sp = rng.normal()
            _, _, fpf = warping(m, r)
            expected = sp + 3 * fpf * s
            assert radial_p_laplacian(m, 2.0, r, s, sp) == expected

    def test_degenerate_rejected(self):
        m = ModelManifold("euclidean", 2)
        with pytest.raises(DegeneracyError):
            radial_p_laplacian(m, 1.5, 1.0, 0.0, 1.0)

    def test_p_harmonic_slope_annihilated(self):
        # v' = f**(-(n-1)/(p-1)) makes the radial p-Laplacian vanish
        for kind, B in (("euclidean", 0.0), ("hyperbolic", 1.0)):
            for n in (2, 3, 5):
                for p in (1.5, 2.0, 3.0):
                    m = ModelManifold(kind, n, B)
                    r = np.linspace(0.2, 3.0, 101)
                    f, fp, fpf = warping(m, r)
                    mexp = (n - 1) / (p - 1.0)
                    s = f**(-mexp)
                    sp = -mexp * f ** (-mexp - 1.0) * fp
                    vals = radial_p_laplacian(m, p, r, s, sp)
                    assert np.max(np.abs(vals)) < 1e-9


def test_curvature_data():
    m = ModelManifold("hyperbolic", 3, 2.0)
    cd = CurvatureData.from_model(m)
    assert cd.S == cd.B == 2.0
    assert cd.bp(2.0) == 2.0          # (p-2)+ = 0
    assert cd.bp(3.0) == 4.0          # B + 1*S
    assert cd.bp(1.5) == 2.0
    with pytest.raises(ConfigurationError):
        CurvatureData(1.0, None).bp(3.0)
    with pytest.raises(DomainError):
        CurvatureData(-1.0)
