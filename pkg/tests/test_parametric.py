import math

import numpy as np
import pytest

from simplexgeom import (
    DomainError,
    FiberVector,
    ProbabilityVector,
    RandomVariable,
    SampleSpace,
    SolidCoordinates,
    TangencyError,
    amari_natural_gradient,
    center,
    exponential_parametrization,
    fisher_inverse,
    fisher_inverse_det,
    fisher_matrix,
    fisher_rao_metric,
    inner_product,
    simplex_to_solid,
    solid_to_simplex,
)
from simplexgeom import _linalg
from simplexgeom.checks import (
    amari_flow_agreement_error,
    fisher_boundary_behavior,
    fisher_identity_errors,
    fisher_rao_errors,
)
from simplexgeom.sampling import random_fiber, random_probability


class TestSolidCoordinates:
    def test_domain_constraints(self):
        with pytest.raises(DomainError):
            SolidCoordinates([0.5, 0.6])  # mass >= 1
        with pytest.raises(DomainError):
            SolidCoordinates([0.0, 0.5])
        with pytest.raises(DomainError):
            SolidCoordinates([-0.1, 0.5])

    def test_projection(self):
        p = solid_to_simplex(SolidCoordinates([0.3]))
        assert np.allclose(p.weights, [0.7, 0.3], atol=1e-15)
        p = solid_to_simplex(SolidCoordinates([0.2, 0.3, 0.4]))
        assert np.allclose(p.weights, [0.1, 0.2, 0.3, 0.4], atol=1e-15)

    def test_roundtrip(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            raw = rng.uniform(0.05, 1.0, n + 1)
            eta = SolidCoordinates(raw[1:] / raw.sum())
            back = simplex_to_solid(solid_to_simplex(eta))
            assert np.max(np.abs(back.eta - eta.eta)) <= 1e-15


class TestFisherMatrix:
    def test_scalar_case(self):
        # 1/eta + 1/(1 - eta) at eta = 0.5 -> 4; inverse 0.25
        I = fisher_matrix(SolidCoordinates([0.5]))
        assert I.entries[0, 0] == pytest.approx(4.0, abs=1e-14)
        assert fisher_inverse(SolidCoordinates([0.5])).entries[0, 0] == pytest.approx(0.25, abs=1e-15)

    def test_closed_form_inverse_entries(self):
        # diag(eta) - eta eta^T at eta = (0.2, 0.3, 0.4)
        inv = fisher_inverse(SolidCoordinates([0.2, 0.3, 0.4])).entries
        expected = np.array(
            [
                [0.16, -0.06, -0.08],
                [-0.06, 0.21, -0.12],
                [-0.08, -0.12, 0.24],
            ]
        )
        assert np.max(np.abs(inv - expected)) <= 1e-15

    def test_determinant_formula(self):
        # (1 - 0.9) * 0.2 * 0.3 * 0.4 = 0.0024, cross-checked by LU
        eta = SolidCoordinates([0.2, 0.3, 0.4])
        det = fisher_inverse_det(eta)
        assert det == pytest.approx(0.0024, abs=1e-15)
        assert det == pytest.approx(_linalg.lu_det(fisher_inverse(eta).entries), rel=1e-12)

    def test_product_is_identity(self):
        eta = SolidCoordinates([0.2, 0.3, 0.4])
        prod = fisher_matrix(eta) @ fisher_inverse(eta)
        assert np.max(np.abs(prod - np.eye(3))) <= 1e-10

    def test_identities_in_bulk(self):
        errs = fisher_identity_errors(seed=31, trials=150)
        assert errs["inverse_vs_lu"] <= 1e-10
        assert errs["det_vs_lu"] <= 1e-10
        assert errs["matrix_vs_definition"] <= 1e-10
        assert errs["product_identity"] <= 1e-10

    def test_boundary_behavior(self):
        bounds = fisher_boundary_behavior(seed=32, trials=20)
        assert bounds["vertex_entry_bound"] <= 1e-5
        assert bounds["facet_det_bound"] <= 1e-5
        assert bounds["facet_small_eig"] <= 1e-5
        assert bounds["facet_spectral_gap"] >= 1e-3

    def test_constructor_rejects_asymmetric(self):
        from simplexgeom.parametric import FisherMatrix

        with pytest.raises(DomainError):
            FisherMatrix([[1.0, 0.2], [0.0, 1.0]])
        with pytest.raises(DomainError):
            FisherMatrix([[1.0, 2.0], [2.0, 1.0]])  # not positive definite


class TestAmariGradient:
    def test_scalar_closed_form(self):
        # f~(eta) = eta has unit coordinate gradient, so the natural
        # coordinate gradient is eta(1 - eta)
        for eta in (0.2, 0.5, 0.7):
            out = amari_natural_gradient([1.0], SolidCoordinates([eta]))
            assert out[0] == pytest.approx(eta * (1.0 - eta), abs=1e-15)

    def test_zero_gradient(self):
        out = amari_natural_gradient([0.0, 0.0], SolidCoordinates([0.2, 0.3]))
        assert np.max(np.abs(out)) == 0.0

    def test_matches_explicit_solve(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            raw = rng.uniform(0.05, 1.0, n + 1)
            eta = SolidCoordinates(raw[1:] / raw.sum())
            g = rng.uniform(-2.0, 2.0, n)
            fast = amari_natural_gradient(g, eta)
            solved = _linalg.lu_inverse(fisher_matrix(eta).entries) @ g
            assert np.max(np.abs(fast - solved)) <= 1e-10

    def test_coordinate_flow_matches_bundle_flow(self):
        assert amari_flow_agreement_error(seed=42) <= 1e-6


class TestExponentialParametrization:
    def test_origin_is_uniform(self):
        p, psi = exponential_parametrization([0.0, 0.0, 0.0])
        assert np.allclose(p.weights, 0.25, atol=1e-15)
        assert psi == pytest.approx(0.0, abs=1e-15)

    def test_log3_case(self):
        # n = 1, theta = log 3 -> p = (1/4, 3/4), psi = log(4/2) = log 2
        p, psi = exponential_parametrization([math.log(3.0)])
        assert np.allclose(p.weights, [0.25, 0.75], atol=1e-14)
        assert psi == pytest.approx(math.log(2.0), abs=1e-14)

    def test_gradient_of_psi_is_mean(self):
        rng = np.random.default_rng(14)
        h = 1e-6
        for _ in range(20):
            n = int(rng.integers(1, 6))
            theta = rng.uniform(-2.0, 2.0, n)
            p, _ = exponential_parametrization(theta)
            j = int(rng.integers(0, n))
            e = np.zeros(n)
            e[j] = h
            dpsi = (
                exponential_parametrization(theta + e)[1]
                - exponential_parametrization(theta - e)[1]
            ) / (2 * h)
            assert dpsi == pytest.approx(p.weights[j + 1], abs=1e-6)

    def test_large_theta_guarded(self):
        p, psi = exponential_parametrization([900.0])
        assert math.isfinite(psi)
        assert np.all(np.isfinite(p.weights))


class TestFisherRao:
    def test_fiber_identity(self):
        # g(Up, Vp) = sum (Up)(Vp)/p = sum U V p = <U, V>_p
        rng = np.random.default_rng(15)
        space = SampleSpace(4)
        p = random_probability(rng, space)
        U = random_fiber(rng, p)
        V = random_fiber(rng, p)
        lhs = fisher_rao_metric(p, U.values * p.weights, V.values * p.weights)
        assert lhs == pytest.approx(inner_product(U, V), abs=1e-14)

    def test_zero_tangent(self):
        p = ProbabilityVector(SampleSpace(3), [0.2, 0.3, 0.5])
        z = np.zeros(3)
        assert fisher_rao_metric(p, z, z) == 0.0

    def test_tangency_enforced(self):
        p = ProbabilityVector(SampleSpace(2), [0.5, 0.5])
        with pytest.raises(TangencyError):
            fisher_rao_metric(p, [1.0, 0.0], [0.5, -0.5])

    def test_sphere_pullback(self):
        # a = 2 sqrt(p) lies on the radius-2 sphere; the differential of the
        # squaring map sends w to a w / 2 and the metric pulls back to the
        # flat sphere metric <w, w'>
        rng = np.random.default_rng(16)
        space = SampleSpace(5)
        p = random_probability(rng, space)
        a = 2.0 * np.sqrt(p.weights)
        assert np.dot(a, a) == pytest.approx(4.0, abs=1e-12)
        for _ in range(20):
            raw1 = rng.uniform(-1.0, 1.0, 5)
            raw2 = rng.uniform(-1.0, 1.0, 5)
            w1 = raw1 - (np.dot(raw1, a) / np.dot(a, a)) * a
            w2 = raw2 - (np.dot(raw2, a) / np.dot(a, a)) * a
            lhs = fisher_rao_metric(p, 0.5 * a * w1, 0.5 * a * w2)
            assert lhs == pytest.approx(float(np.dot(w1, w2)), abs=1e-13)

    def test_identities_in_bulk(self):
        errs = fisher_rao_errors(seed=33, trials=60)
        assert errs["fiber_identity"] <= 1e-12
        assert errs["sphere_pullback"] <= 1e-12


class TestLinalgKernel:
    def test_cholesky_against_reconstruction(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(1, 7))
            b = rng.uniform(-1.0, 1.0, (n, n))
            a = b @ b.T + n * np.eye(n)
            L = _linalg.cholesky(a)
            assert np.max(np.abs(L @ L.T - a)) <= 1e-10

    def test_lu_inverse_and_det(self):
        rng = np.random.default_rng(18)
        for _ in range(20):
            n = int(rng.integers(1, 7))
            a = rng.uniform(-1.0, 1.0, (n, n)) + n * np.eye(n)
            inv = _linalg.lu_inverse(a)
            assert np.max(np.abs(a @ inv - np.eye(n))) <= 1e-10
            # determinant via the permanent expansion is exponential; compare
            # against the cofactor expansion for small n instead
            if n <= 4:
                def det_rec(m):
                    if m.shape[0] == 1:
                        return m[0, 0]
                    return sum(
                        (-1.0) ** j * m[0, j] * det_rec(np.delete(np.delete(m, 0, 0), j, 1))
                        for j in range(m.shape[0])
                    )
                assert _linalg.lu_det(a) == pytest.approx(det_rec(a), rel=1e-10)

    def test_jacobi_eigenvalues(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            n = int(rng.integers(2, 7))
            b = rng.uniform(-1.0, 1.0, (n, n))
            a = 0.5 * (b + b.T)
            eigs = _linalg.symmetric_eigenvalues(a)
            # trace and Frobenius norm are spectral invariants
            assert eigs.sum() == pytest.approx(np.trace(a), abs=1e-10)
            assert np.sum(eigs**2) == pytest.approx(np.sum(a * a), abs=1e-10)
