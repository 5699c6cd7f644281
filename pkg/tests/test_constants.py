"""Proof constants: explicit derivations plus their randomized/grid certifications."""

import numpy as np
import pytest

from conftest import npq_grid, q_grid

from hjlab.constants import (
    Exponents,
    amplification,
    barrier_lambda_mu,
    bochner_constants,
    bochner_margin,
    bochner_margin_direct,
    build_constants,
    certify_bochner,
    ellipticity,
    gradient_constant,
    harnack_constant,
    k_constant,
)
from hjlab.errors import ConstraintError, DomainError


class TestExponents:
    def test_derived(self):
        e = Exponents(2.0, 3.0)
        assert e.e1 == 2.0 and e.e2 == 3.0

    def test_constraint(self):
        with pytest.raises(ConstraintError):
            Exponents(2.0, 1.0)   # q = p-1
        with pytest.raises(ConstraintError):
            Exponents(1.0, 2.0)   # p-1 = 0
        with pytest.raises(ConstraintError):
            Exponents(3.0, 1.5)


class TestEllipticity:
    def test_values(self):
        assert ellipticity(2.0) == (1.0, 1.0)
        assert ellipticity(3.0) == (1.0, 2.0)
        assert ellipticity(1.5) == (0.5, 1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            ellipticity(1.0)

    def test_theta_product(self):
        for p in (1.2, 1.5, 2.0, 2.5, 4.0):
            theta, Theta = ellipticity(p)
            assert theta * Theta == pytest.approx(p - 1.0)
            assert theta <= 1.0 <= Theta

    def test_quadratic_form_sandwich(self, rng):
        # xi^T (I + (p-2) nu nu^T) xi in [theta |xi|^2, Theta |xi|^2]
        for p in (1.5, 2.0, 3.0, 4.0):
            theta, Theta = ellipticity(p)
            for dim in (2, 3, 4, 5):
                nu = rng.normal(size=(2500, dim))
                nu /= np.linalg.norm(nu, axis=1, keepdims=True)
                xi = rng.normal(size=(2500, dim))
                dots = np.einsum("ij,ij->i", nu, xi)
                quad = np.einsum("ij,ij->i", xi, xi) + (p - 2.0) * dots**2
                norm2 = np.einsum("ij,ij->i", xi, xi)
                assert np.all(quad >= theta * norm2 - 1e-12 * norm2)
                assert np.all(quad <= Theta * norm2 + 1e-12 * norm2)


class TestBochnerConstants:
    def test_p2_formulas(self):
        # p = 2 kills the |p-2| terms: C = 1/n, D = 1/n + n e2^2/4
        for n in (2, 3, 5):
            for q in (1.5, 2.0, 3.0):
                e = Exponents(2.0, q)
                a, C, D = bochner_constants(e, n)
                assert a == 1.0
                assert C == pytest.approx(1.0 / n)
                assert D == pytest.approx(1.0 / n + n * e.e2**2 / 4.0)
        _, C, D = bochner_constants(Exponents(2.0, 2.0), 3)
        assert C == pytest.approx(1.0 / 3.0)
        assert D == pytest.approx(1.0 / 3.0 + 0.75 * 4.0)

    def test_positive(self):
        for n, p, q in npq_grid():
            _, C, D = bochner_constants(Exponents(p, q), n)
            assert C > 0.0 and D > 0.0

    def test_margin_decomposition_matches_direct(self, rng):
        # the stable sum-of-nonnegatives form is algebraically the raw margin;
        # compare at benign scales where the raw form doesn't cancel
        for n, p, q in npq_grid():
            e = Exponents(p, q)
            z = np.exp(rng.uniform(np.log(0.1), np.log(10.0), 2000))
            P = rng.uniform(0.0, 10.0, 2000)
            u = rng.uniform(-1.0, 1.0, 2000)
            stable = bochner_margin(e, n, z, P, u)
            direct = bochner_margin_direct(e, n, z, P, u * P * np.sqrt(z))
            scale = np.maximum(1.0, np.abs(direct))
            assert np.max(np.abs(stable - direct) / scale) < 1e-9

    def test_certification_example(self):
        cert = certify_bochner(Exponents(2.0, 2.0), 2, samples=100_000, seed=0)
        assert cert.passed and cert.min_margin >= 0.0

    def test_certification_grid(self):
        for n, p, q in npq_grid():
            cert = certify_bochner(Exponents(p, q), n, samples=20_000, seed=3)
            assert cert.min_margin >= 0.0, (n, p, q, cert.argmin)


class TestKConstant:
    def test_monotone_in_n(self):
        for p in (1.5, 2.0, 3.0):
            for q in q_grid(p):
                e = Exponents(p, q)
                ks = [k_constant(n, e) for n in (2, 3, 4, 5, 8)]
                assert all(a <= b for a, b in zip(ks, ks[1:]))

    def test_p2_reduces_to_laplacian_contribution(self):
        # at p = 2 the Hessian term carries coefficient p-2 = 0
        e = Exponents(2.0, 2.0)
        n = 3
        assert k_constant(n, e) == pytest.approx((4.0 / e.e1) * (2 * (e.q + 1) / e.e1 + n))

    def test_grid_certification(self):
        # assembled bound -k lam y^(-2e2/e1) (R^2 + y Bp r) must sit below the
        # direct displayed brackets at every radius
        R, B = 1.0, 1.0
        r = np.linspace(1e-6, R * (1 - 1e-9), 10_000)
        y = R**2 - r**2
        for n, p, q in npq_grid():
            e = Exponents(p, q)
            k = k_constant(n, e)
            S = B
            bp_val = B + max(p - 2.0, 0.0) * S
            lead = 2.0 * r**2 * (q + 3.0 - p) / e.e1
            lap = lead + y * (1.0 + (n - 1) * (1.0 + B * r))
            if p >= 2.0:
                hess = lead + y * (2.0 + S * r)
            else:
                hess = lead + 2.0 * y
            total = (4.0 / e.e1) * (lap + abs(p - 2.0) * hess)
            normal_form = k * (R**2 + y * bp_val * r)
            assert np.all(total <= normal_form * (1 + 1e-12)), (n, p, q)


class TestBarrierLambdaMu:
    def test_mu_value(self):
        # (n-1) B^2 to the power 1/e1 with e1 = 1
        _, mu, _ = barrier_lambda_mu(3, Exponents(2.0, 2.0), 1.0, 1.0, 1.0)
        assert mu == pytest.approx(2.0)

    def test_b0_second_branch(self):
        e = Exponents(2.0, 2.0)
        lam, mu, _ = barrier_lambda_mu(3, e, 0.0, 0.0, 1.0)
        assert mu == 0.0
        pc = build_constants(3, e, 0.0, 0.0, 1.0)
        # lambda = c ((1+Bp) R^3)^(1/e1) with the B-branch gone
        assert lam == pytest.approx(pc.c * 1.0)

    def test_lambda_nondecreasing_in_R(self):
        for n, p, q in npq_grid():
            e = Exponents(p, q)
            lams = [barrier_lambda_mu(n, e, 1.0, 1.0, R)[0] for R in (0.25, 0.5, 1.0, 2.0, 8.0)]
            assert all(a <= b * (1 + 1e-12) for a, b in zip(lams, lams[1:]))

    def test_amplification(self):
        for n, p, q in npq_grid():
            e = Exponents(p, q)
            A = amplification(e, n)
            assert A >= 1.0
            # power of two
            assert A == 2.0 ** round(np.log2(A))
            _, C, _ = bochner_constants(e, n)
            if C * e.e2 >= 1.0:
                assert A == 1.0
            else:
                # trigger: C e2 (A mu)^e1 >= (n-1) B^2 for mu = ((n-1)B^2)^(1/e1)
                assert C * e.e2 * A**e.e1 >= 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            barrier_lambda_mu(3, Exponents(2.0, 2.0), 1.0, 1.0, 0.0)


class TestScaling:
    def test_mu_power_law(self):
        e = Exponents(2.0, 3.0)
        _, mu1, _ = barrier_lambda_mu(3, e, 1.0, 1.0, 1.0)
        for t in (0.5, 2.0, 10.0):
            _, mut, _ = barrier_lambda_mu(3, e, t, t, 1.0)
            assert mut == pytest.approx(t ** (2.0 / e.e1) * mu1, rel=1e-12)

    def test_gradient_bound_power_law(self):
        from hjlab.estimates import global_gradient_bound

        e = Exponents(2.0, 3.0)
        base = global_gradient_bound(3, e, 1.0)
        for t in (0.5, 2.0, 10.0):
            assert global_gradient_bound(3, e, t) == pytest.approx(
                t ** (1.0 / e.e1) * base, rel=1e-12
            )


class TestLedgerRecord:
    def test_c_grad_dominates_exact_solution(self):
        # ((n-1) B)^(1/e1) = (n-1)^(1/e1) B^(1/e1) forces c_grad >= (n-1)^(1/e1)
        for n, p, q in npq_grid():
            e = Exponents(p, q)
            assert gradient_constant(n, e) >= (n - 1) ** (1.0 / e.e1)

    def test_harnack_constant_dominates_exact_ratio(self):
        for n in (2, 3, 5):
            for p in (1.5, 2.0, 3.0, 4.0):
                assert harnack_constant(n, p) >= (n - 1) / (p - 1.0)

    def test_row_shape(self):
        pc = build_constants(3, Exponents(2.0, 2.0), 1.0, 1.0, 1.0)
        row = pc.ledger_row()
        assert len(row) == len(pc.LEDGER_COLUMNS.split(","))
        assert row[:6] == [3, 2.0, 2.0, 1.0, 1.0, 1.0]
        assert pc.theta == pc.Theta == 1.0
