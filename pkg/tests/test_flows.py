import io
import math

import numpy as np
import pytest

from simplexgeom import (
    DomainError,
    FiberVector,
    NumericalBlowup,
    OutOfInterval,
    NormError,
    ProbabilityVector,
    RandomVariable,
    SampleSpace,
    Section,
    center,
    entropy,
    entropy_flow_curve,
    entropy_section,
    exp_family_curve,
    expected_value_section,
    flow_from_config,
    grad_entropy,
    grad_kl_first,
    grad_kl_second,
    h_flow_curve,
    h_transport,
    inner_product,
    integrate_flow,
    kl_relaxation_curve,
    kl_reverse_section,
    m_transport,
    m_transport_section,
    mixture_flow_curve,
    mixture_interval,
    monitor_gradient_flow,
    natural_gradient,
    score_of_curve,
)
from simplexgeom.checks import (
    expectation_derivative_error,
    level_set_orthogonality_error,
)

S2 = SampleSpace(2)
S3 = SampleSpace(3)
UNIFORM2 = ProbabilityVector.uniform(S2)


class TestNaturalGradient:
    def test_expected_value(self):
        f = RandomVariable(S2, [0.0, 1.0])
        g = natural_gradient(lambda p: f, ProbabilityVector(S2, [0.5, 0.5]))
        assert np.allclose(g.values, [-0.5, 0.5], atol=1e-15)

    def test_entropy_at_uniform_vanishes(self):
        g = grad_entropy(ProbabilityVector.uniform(SampleSpace(4)))
        assert np.max(np.abs(g.values)) <= 1e-14

    def test_kl_gradients_vanish_at_target(self):
        p = ProbabilityVector(S3, [0.2, 0.3, 0.5])
        assert np.max(np.abs(grad_kl_first(p, p).values)) <= 1e-14
        assert np.max(np.abs(grad_kl_second(p, p).values)) <= 1e-14

    def test_grad_entropy_values(self):
        # H = 0.5623351446188083; (-log(1/4) - H, -log(3/4) - H)
        p = ProbabilityVector(S2, [0.25, 0.75])
        g = grad_entropy(p)
        assert g.values[0] == pytest.approx(0.8239592165010823, abs=1e-12)
        assert g.values[1] == pytest.approx(-0.2746530721670274, abs=1e-12)

    def test_grad_kl_second_componentwise(self):
        # 1 - p0/p at p=(1/2,1/2), p0=(1/4,3/4) -> (1/2, -1/2)
        p = ProbabilityVector(S2, [0.5, 0.5])
        p0 = ProbabilityVector(S2, [0.25, 0.75])
        assert np.allclose(grad_kl_second(p, p0).values, [0.5, -0.5], atol=1e-15)

    def test_gradients_are_centered(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            w = rng.uniform(0.05, 1.0, 3)
            p = ProbabilityVector.normalized(S3, w)
            p0 = ProbabilityVector.normalized(S3, rng.uniform(0.05, 1.0, 3))
            for g in (grad_entropy(p), grad_kl_first(p, p0), grad_kl_second(p, p0)):
                assert abs(p.expectation(g)) <= 1e-10


class TestExpFamilyCurve:
    def test_time_zero(self):
        f = RandomVariable(S2, [0.0, 1.0])
        pt, rec = exp_family_curve(f, UNIFORM2, 0.0)
        assert pt == UNIFORM2
        assert rec.psi == pytest.approx(0.0, abs=1e-15)

    def test_log3_reaches_quarter(self):
        # psi(log 3) = log((1 + 3)/2) = log 2; point (1/4, 3/4)
        f = RandomVariable(S2, [0.0, 1.0])
        pt, rec = exp_family_curve(f, UNIFORM2, math.log(3.0))
        assert np.allclose(pt.weights, [0.25, 0.75], atol=1e-15)
        assert rec.psi == pytest.approx(math.log(2.0), abs=1e-15)
        assert rec.psi_dot == pytest.approx(0.75, abs=1e-15)
        assert rec.psi_ddot == pytest.approx(0.1875, abs=1e-15)

    def test_cumulant_convexity(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            f = RandomVariable(S3, rng.uniform(-2, 2, 3))
            p0 = ProbabilityVector.normalized(S3, rng.uniform(0.05, 1, 3))
            t1, t2 = sorted(rng.uniform(-3, 3, 2))
            _, r1 = exp_family_curve(f, p0, t1)
            _, r2 = exp_family_curve(f, p0, t2)
            assert r1.psi_ddot >= 0.0
            assert (r2.psi_dot - r1.psi_dot) * (t2 - t1) >= -1e-12

    def test_overflow_guarded(self):
        f = RandomVariable(S2, [0.0, 1.0])
        pt, rec = exp_family_curve(f, UNIFORM2, 800.0)
        assert np.all(np.isfinite(pt.weights))
        assert math.isfinite(rec.psi)


class TestEntropyFlowCurve:
    def test_time_zero(self):
        p0 = ProbabilityVector(S2, [0.25, 0.75])
        assert entropy_flow_curve(p0, 0.0) == p0

    def test_half_exponent(self):
        # exp(-t) = 1/2: normalize (1/2, sqrt(3)/2) -> (1, sqrt 3)/(1 + sqrt 3)
        p0 = ProbabilityVector(S2, [0.25, 0.75])
        pt = entropy_flow_curve(p0, math.log(2.0))
        s3 = math.sqrt(3.0)
        assert np.allclose(
            pt.weights, [1.0 / (1.0 + s3), s3 / (1.0 + s3)], atol=1e-15
        )

    def test_long_time_limit_is_uniform(self):
        p0 = ProbabilityVector(S2, [0.25, 0.75])
        pt = entropy_flow_curve(p0, 20.0)
        assert np.max(np.abs(pt.weights - 0.5)) <= 1e-8


class TestMixtureFlowCurve:
    def test_componentwise(self):
        p = ProbabilityVector(S2, [0.5, 0.5])
        U = FiberVector(p, [1.0, -1.0])
        assert mixture_interval(U) == (-1.0, 1.0)
        pt = mixture_flow_curve(U, 0.5)
        assert np.allclose(pt.weights, [0.75, 0.25], atol=1e-15)

    def test_time_zero(self):
        p = ProbabilityVector(S3, [0.2, 0.3, 0.5])
        U = center(RandomVariable(S3, [1.0, 0.0, -1.0]), p)
        assert mixture_flow_curve(U, 0.0) == p

    def test_out_of_interval_reports_bounds(self):
        p = ProbabilityVector(S2, [0.5, 0.5])
        U = FiberVector(p, [1.0, -1.0])
        with pytest.raises(OutOfInterval) as err:
            mixture_flow_curve(U, 1.5)
        assert err.value.interval == (-1.0, 1.0)

    def test_score_is_transported_direction(self):
        p = ProbabilityVector(S3, [0.5, 0.2, 0.3])
        U = center(RandomVariable(S3, [1.0, -0.5, 0.2]), p)
        t0 = 0.4
        numeric = score_of_curve(lambda t: mixture_flow_curve(U, t), t0, h=1e-5)
        carried = m_transport(U, mixture_flow_curve(U, t0))
        assert np.max(np.abs(numeric.values - carried.values)) <= 1e-8


class TestHFlowCurve:
    def test_time_zero(self):
        p = ProbabilityVector(S2, [0.5, 0.5])
        U = FiberVector(p, [1.0, -1.0])
        assert h_flow_curve(U, 0.0) == p

    def test_sine_form_on_two_points(self):
        # ((1 + sin t)/2, (1 - sin t)/2); t = pi/6 -> (3/4, 1/4)
        p = ProbabilityVector(S2, [0.5, 0.5])
        U = FiberVector(p, [1.0, -1.0])
        pt = h_flow_curve(U, math.pi / 6.0)
        assert np.allclose(pt.weights, [0.75, 0.25], atol=1e-15)

    def test_requires_unit_norm(self):
        p = ProbabilityVector(S2, [0.5, 0.5])
        with pytest.raises(NormError):
            h_flow_curve(FiberVector(p, [2.0, -2.0]), 0.1)

    def test_positivity_violation(self):
        p = ProbabilityVector(S2, [0.5, 0.5])
        U = FiberVector(p, [1.0, -1.0])
        with pytest.raises(OutOfInterval):
            h_flow_curve(U, 2.0)  # cos 1 + sin 1 * (-1) < 0

    def test_score_is_transported_direction(self):
        p = ProbabilityVector(S3, [0.4, 0.35, 0.25])
        raw = center(RandomVariable(S3, [1.0, -1.0, 0.3]), p)
        U = raw * (1.0 / raw.norm())
        t0 = 0.3
        numeric = score_of_curve(lambda t: h_flow_curve(U, t), t0, h=1e-5)
        carried = h_transport(U, h_flow_curve(U, t0))
        assert np.max(np.abs(numeric.values - carried.values)) <= 1e-8


class TestIntegrateFlow:
    def test_expected_value_flow_hits_closed_form(self):
        f = RandomVariable(S2, [0.0, 1.0])
        traj = integrate_flow(expected_value_section(f), UNIFORM2, t_end=math.log(3.0), dt=1e-3)
        assert np.max(np.abs(traj.final_point.weights - [0.25, 0.75])) <= 1e-6

    def test_zero_section_is_constant(self):
        p0 = ProbabilityVector(S3, [0.2, 0.3, 0.5])
        traj = integrate_flow(Section(FiberVector.zero), p0, t_end=1.0, dt=1e-2)
        assert np.max(np.abs(traj.weights - p0.weights)) <= 1e-14

    def test_kl_descent_hits_relaxation(self):
        # p(log 2) = p0 + (p(0) - p0)/2 = (3/8, 5/8)
        p_init = ProbabilityVector(S2, [0.25, 0.75])
        target = ProbabilityVector(S2, [0.5, 0.5])
        traj = integrate_flow(
            kl_reverse_section(target), p_init, t_end=math.log(2.0), dt=1e-3, sign=-1
        )
        assert np.max(np.abs(traj.final_point.weights - [0.375, 0.625])) <= 1e-6

    def test_callable_section_without_raw(self):
        f = RandomVariable(S2, [0.0, 1.0])
        traj = integrate_flow(lambda p: center(f, p), UNIFORM2, t_end=0.5, dt=1e-3)
        oracle = exp_family_curve(f, UNIFORM2, 0.5)[0]
        assert np.max(np.abs(traj.final_point.weights - oracle.weights)) <= 1e-9

    def test_score_samples_have_zero_mean(self):
        f = RandomVariable(S3, [1.0, -0.3, 0.1])
        p0 = ProbabilityVector(S3, [0.2, 0.3, 0.5])
        traj = integrate_flow(expected_value_section(f), p0, t_end=1.0, dt=1e-2)
        means = np.abs(np.einsum("ij,ij->i", traj.weights, traj.score_values))
        assert means.max() <= 1e-8

    def test_lands_exactly_on_t_end(self):
        f = RandomVariable(S2, [0.0, 1.0])
        traj = integrate_flow(expected_value_section(f), UNIFORM2, t_end=0.0105, dt=1e-3)
        assert traj.times[-1] == pytest.approx(0.0105, abs=1e-12)

    def test_invalid_parameters(self):
        f = RandomVariable(S2, [0.0, 1.0])
        with pytest.raises(DomainError):
            integrate_flow(expected_value_section(f), UNIFORM2, t_end=-1.0, dt=1e-3)
        with pytest.raises(DomainError):
            integrate_flow(expected_value_section(f), UNIFORM2, t_end=1.0, dt=1e-3, sign=2)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blowup_reports_time(self):
        exploding = Section(
            lambda p: FiberVector(p, [1e308, -1e308] / (p.weights[0] ** 4)),
            raw=lambda w, lw: np.array([1e308, -1e308]) / w[0] ** 4,
        )
        with pytest.raises(NumericalBlowup) as err:
            integrate_flow(exploding, UNIFORM2, t_end=1.0, dt=0.25)
        assert err.value.t is not None


class TestMonitor:
    def test_descent_monotone_and_converged(self):
        f = RandomVariable(SampleSpace(4), [0.0, 1.0, 2.0, 3.0])
        neg_f = RandomVariable(f.space, -f.values)
        p0 = ProbabilityVector.uniform(SampleSpace(4))
        traj = integrate_flow(expected_value_section(neg_f), p0, t_end=20.0, dt=1e-2, sign=-1)
        report = monitor_gradient_flow(traj, lambda p: -p.expectation(f))
        assert report.monotone
        assert report.dominant_index == 3
        delta3 = np.array([0.0, 0.0, 0.0, 1.0])
        assert np.max(np.abs(report.terminal_point.weights - delta3)) <= 1e-3
        assert report.terminal_grad_norm <= 1e-3
        # the f-decrease equals the integral of ||Sp||^2 along the flow
        drop = report.f_values[0] - report.f_values[-1]
        assert drop == pytest.approx(report.grad_norm_sq_integral, rel=1e-3)

    def test_constant_function_is_flat(self):
        p0 = ProbabilityVector(S3, [0.2, 0.3, 0.5])
        traj = integrate_flow(Section(FiberVector.zero), p0, t_end=1.0, dt=1e-2)
        report = monitor_gradient_flow(traj, lambda p: 1.0)
        assert report.monotone
        assert report.max_increase == 0.0
        assert report.grad_norm_sq_integral == pytest.approx(0.0, abs=1e-16)

    def test_entropy_ascent_reaches_uniform(self):
        p0 = ProbabilityVector(S3, [0.7, 0.2, 0.1])
        traj = integrate_flow(entropy_section(), p0, t_end=20.0, dt=1e-2)
        assert np.max(np.abs(traj.final_point.weights - 1.0 / 3.0)) <= 1e-6


class TestFlowIdentities:
    def test_expectation_derivative_identity(self):
        assert expectation_derivative_error(seed=3, trials=25) <= 1e-6

    def test_level_set_orthogonality(self):
        orth, level = level_set_orthogonality_error(seed=4)
        assert orth <= 1e-6
        assert level <= 1e-6

    def test_derivative_of_f_along_flow_is_inner_product(self):
        f = RandomVariable(S3, [0.3, -0.2, 1.0])
        p0 = ProbabilityVector(S3, [0.25, 0.4, 0.35])
        curve = lambda t: exp_family_curve(f, p0, t)[0]
        t0, h = 0.6, 1e-5
        g = RandomVariable(S3, [1.0, 2.0, -0.5])
        lhs = (curve(t0 + h).expectation(g) - curve(t0 - h).expectation(g)) / (2 * h)
        pt = curve(t0)
        rhs = inner_product(center(g, pt), center(f, pt))
        assert lhs == pytest.approx(rhs, abs=1e-6)


class TestTrajectoryCsv:
    def test_header_and_precision(self):
        f = RandomVariable(S2, [0.0, 1.0])
        traj = integrate_flow(expected_value_section(f), UNIFORM2, t_end=0.01, dt=1e-2)
        buf = io.StringIO()
        traj.to_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "t,p_0,p_1,s_0,s_1"
        assert len(lines) == len(traj) + 1
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 0.5
        # scores at t=0: f - E f = (-1/2, 1/2)
        assert float(first[3]) == pytest.approx(-0.5, abs=1e-15)


class TestFlowConfig:
    def test_entropy_config(self):
        spec = flow_from_config({"flow": "entropy", "p0": [0.25, 0.75], "t_end": 1.0})
        assert spec.kind == "entropy"
        assert spec.objective is not None
        assert spec.dt == 1e-3 and spec.sign == 1

    def test_expected_needs_f(self):
        with pytest.raises(DomainError):
            flow_from_config({"flow": "expected", "p0": [0.5, 0.5]})

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            flow_from_config({"flow": "bogus", "p0": [0.5, 0.5]})

    def test_custom_is_mixture_section(self):
        spec = flow_from_config(
            {"flow": "custom", "p0": [0.5, 0.5], "f": [1.0, -1.0], "t_end": 0.25}
        )
        assert spec.objective is None
        traj = spec.run()
        U = FiberVector(spec.p0, [1.0, -1.0])
        oracle = mixture_flow_curve(U, 0.25)
        assert np.max(np.abs(traj.final_point.weights - oracle.weights)) <= 1e-6

    def test_kl_m_descent(self):
        spec = flow_from_config(
            {
                "flow": "kl_m",
                "p0": [0.25, 0.75],
                "f": [0.5, 0.5],
                "t_end": math.log(2.0),
                "sign": -1,
            }
        )
        traj = spec.run()
        assert np.max(np.abs(traj.final_point.weights - [0.375, 0.625])) <= 1e-6
