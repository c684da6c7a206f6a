import math

import numpy as np
import pytest

from bosonic_metrology.bounds import (
    BoundReport,
    HCorrection,
    InfeasibleConstraintError,
    ab_operators,
    closed_form_h,
    hamiltonian_rate_bound,
    hnls_test,
    interior_margin,
    noise_rate_bound,
    numeric_h_optimization,
    passive_temperature_bounds,
    quadratic_bound,
    rate_bound,
    theorem1_rate,
    theorem1_rate_optimized,
)
from bosonic_metrology.core import (
    ParameterTag,
    build_fock_space,
    model_for_target,
)
from bosonic_metrology.fock import (
    density_from_vector,
    fock_vector,
    thermal_density,
)


def diagonal_state(n_mean: float, space) -> np.ndarray:
    """Fock-diagonal state with the requested mean occupation."""
    lo = int(math.floor(n_mean))
    hi = lo + 1
    w = hi - n_mean
    rho = np.zeros((space.cutoff, space.cutoff), dtype=complex)
    rho[lo, lo] = w
    if hi < space.cutoff and w < 1.0:
        rho[hi, hi] = 1.0 - w
    return rho


class TestHnls:
    def test_two_photon_drive_escapes_span_at_zero_temperature(self):
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.0)
        assert hnls_test(m, build_fock_space(40)) is True

    def test_two_photon_drive_inside_span_at_finite_temperature(self):
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.05)
        assert hnls_test(m, build_fock_space(40)) is False

    def test_frequency_always_inside_span(self):
        for n_env in (0.0, 0.3):
            m = model_for_target(ParameterTag.FREQUENCY, n_env=n_env)
            assert hnls_test(m, build_fock_space(40)) is False

    def test_requires_hamiltonian_target(self):
        m = model_for_target(ParameterTag.LOSS, n_env=0.1)
        with pytest.raises(ValueError):
            hnls_test(m, build_fock_space(20))


class TestAbOperators:
    def test_zero_correction_reduces_to_generator(self):
        sp = build_fock_space(20)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.3)
        a_op, b_op = ab_operators(HCorrection.zero(2), m, sp)
        assert np.linalg.norm(a_op) == 0.0
        assert np.allclose(b_op, m.generator_derivative(sp))

    def test_closed_form_cancels_generator_on_interior(self):
        sp = build_fock_space(40)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.2)
        h, _ = closed_form_h(m, 4.0)
        _, b_op = ab_operators(h, m, sp)
        cut = sp.cutoff - interior_margin(m)
        assert np.linalg.norm(b_op[:cut, :cut]) < 1e-10

    def test_general_form_noise_expectation(self):
        # <a(0)> with jump derivatives included equals
        # ((1+2n)N + n)/(4 gamma) on a Fock state
        n_env, n_fock, gamma = 0.3, 6, 1.4
        sp = build_fock_space(20)
        m = model_for_target(ParameterTag.LOSS, gamma=gamma, n_env=n_env)
        a_op, b_op = ab_operators(HCorrection.zero(2), m, sp,
                                  general=True)
        rho = density_from_vector(fock_vector(n_fock, sp))
        expect = ((1 + 2 * n_env) * n_fock + n_env) / (4.0 * gamma)
        assert np.trace(rho @ a_op).real == pytest.approx(expect,
                                                          rel=1e-12)
        # the anti-hermitian jump cross terms cancel for this model
        assert np.linalg.norm(b_op) < 1e-12

    def test_dimension_mismatch(self):
        sp = build_fock_space(10)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        with pytest.raises(ValueError):
            ab_operators(HCorrection.zero(1), m, sp)


class TestClosedFormH:
    def test_frequency_reference_point(self):
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        _, a_val = closed_form_h(m, 5.0)
        assert a_val == pytest.approx(5.0 / (1.2 - 0.1 / 6.0), rel=1e-12)
        assert 4 * a_val == pytest.approx(16.901408450704224, rel=1e-9)

    def test_displacement_energy_independent(self):
        m = model_for_target(ParameterTag.DISPLACEMENT, n_env=0.25)
        vals = [closed_form_h(m, n)[1] for n in (0.0, 3.0, 50.0)]
        assert all(v == pytest.approx(1.0 / 1.5, rel=1e-12) for v in vals)

    def test_closed_form_matches_matrix_expectation(self):
        # the correction value must equal tr(rho a(h)) built from matrices
        sp = build_fock_space(60)
        for target in (ParameterTag.FREQUENCY, ParameterTag.DISPLACEMENT,
                       ParameterTag.SQUEEZING):
            m = model_for_target(target, n_env=0.2)
            h, a_val = closed_form_h(m, 7.0)
            a_op, _ = ab_operators(h, m, sp)
            rho = diagonal_state(7.0, sp)
            assert np.trace(rho @ a_op).real == pytest.approx(a_val,
                                                              rel=1e-10)

    def test_squeezing_large_temperature_decay(self):
        n_env = 1e4
        m = model_for_target(ParameterTag.SQUEEZING, n_env=n_env)
        _, a_val = closed_form_h(m, 5.0)
        assert 4 * a_val == pytest.approx(4 * 11.0 / n_env, rel=1e-3)

    def test_squeezing_zero_temperature_infeasible(self):
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.0)
        with pytest.raises(InfeasibleConstraintError):
            closed_form_h(m, 5.0)

    def test_zero_temperature_frequency_and_displacement(self):
        mf = model_for_target(ParameterTag.FREQUENCY, n_env=0.0)
        _, a_val = closed_form_h(mf, 5.0)
        assert a_val == pytest.approx(5.0, rel=1e-12)
        md = model_for_target(ParameterTag.DISPLACEMENT, n_env=0.0)
        _, a_val = closed_form_h(md, 5.0)
        assert a_val == pytest.approx(1.0, rel=1e-12)


class TestNumericHOptimization:
    def test_matches_closed_form_on_diagonal_states(self):
        sp = build_fock_space(60)
        for target in (ParameterTag.FREQUENCY, ParameterTag.DISPLACEMENT,
                       ParameterTag.SQUEEZING):
            m = model_for_target(target, n_env=0.1)
            _, a_closed = closed_form_h(m, 5.0)
            res = numeric_h_optimization(
                m, density_from_vector(fock_vector(5, sp)), sp)
            assert abs(res.a_expect - a_closed) / a_closed < 1e-6
            assert res.constraint_residual < 1e-8

    def test_thermal_like_diagonal_state(self):
        sp = build_fock_space(60)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        rho = thermal_density(0.8, sp)
        n_mean = np.trace(rho @ sp.number).real
        _, a_closed = closed_form_h(m, n_mean)
        res = numeric_h_optimization(m, rho, sp)
        assert res.a_expect == pytest.approx(a_closed, rel=1e-6)

    def test_squeezing_infeasible_at_zero_temperature(self):
        sp = build_fock_space(40)
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.0)
        with pytest.raises(InfeasibleConstraintError):
            numeric_h_optimization(
                m, density_from_vector(fock_vector(3, sp)), sp)

    def test_displacement_solution_has_no_quadratic_part(self):
        sp = build_fock_space(50)
        m = model_for_target(ParameterTag.DISPLACEMENT, n_env=0.3)
        res = numeric_h_optimization(
            m, density_from_vector(fock_vector(4, sp)), sp)
        assert np.linalg.norm(res.h.hmat) < 1e-8
        assert res.a_expect == pytest.approx(1.0 / 1.6, rel=1e-9)

    def test_noise_target_recovers_jump_derivative_norm(self):
        sp = build_fock_space(50)
        m = model_for_target(ParameterTag.LOSS, n_env=0.2)
        rho = density_from_vector(fock_vector(5, sp))
        res = numeric_h_optimization(m, rho, sp)
        expect = ((1 + 2 * 0.2) * 5 + 0.2) / 4.0
        assert res.a_expect == pytest.approx(expect, rel=1e-9)

    def test_truncation_stability(self):
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.1)
        vals = []
        for cutoff in (40, 80):
            sp = build_fock_space(cutoff)
            res = numeric_h_optimization(
                m, density_from_vector(fock_vector(5, sp)), sp)
            vals.append(res.a_expect)
        assert abs(vals[0] - vals[1]) < 1e-6

    def test_state_near_cutoff_rejected(self):
        sp = build_fock_space(12)
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.1)
        with pytest.raises(ValueError, match="cutoff"):
            numeric_h_optimization(
                m, density_from_vector(fock_vector(8, sp)), sp)


class TestRateBounds:
    def test_frequency_large_energy_limit(self):
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.3)
        report = hamiltonian_rate_bound(m, 1e5)
        assert report.rate_bound == pytest.approx(4e5 / 1.6, rel=1e-4)
        assert report.tau == pytest.approx(
            1.0 / (2 * (1e5 + 1) * 1.6), rel=1e-12)

    def test_displacement_report(self):
        m = model_for_target(ParameterTag.DISPLACEMENT, n_env=0.1)
        report = hamiltonian_rate_bound(m, 5.0)
        assert report.rate_bound == pytest.approx(4.0 / 1.2, rel=1e-12)
        assert report.tau == pytest.approx(1.0 / (22 * 1.2), rel=1e-12)

    def test_squeezing_report_value(self):
        # frozen from the constrained optimum 4((1+2n)N+n)/(n(1+n));
        # the published large-N constant is carried as a reference note
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.1)
        report = hamiltonian_rate_bound(m, 5.0)
        assert report.rate_bound == pytest.approx(4 * 6.1 / 0.11,
                                                  rel=1e-12)
        assert report.components["reference_large_n"] == pytest.approx(
            4 * 11 / math.sqrt(0.11), rel=1e-12)
        assert report.notes

    def test_squeezing_unbounded_at_zero_temperature(self):
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.0)
        report = hamiltonian_rate_bound(m, 5.0)
        assert report.unbounded
        assert math.isinf(report.rate_bound)

    def test_loss_reference_point(self):
        m = model_for_target(ParameterTag.LOSS, n_env=0.1)
        report = noise_rate_bound(m, 5.0)
        assert report.rate_bound == pytest.approx(6.1, rel=1e-12)

    def test_temperature_reference_point(self):
        m = model_for_target(ParameterTag.TEMPERATURE, n_env=0.1)
        report = noise_rate_bound(m, 5.0)
        assert report.rate_bound == pytest.approx(6.0 / 0.11 + 10.0,
                                                  rel=1e-12)
        assert report.components["large_n_term"] == pytest.approx(
            6.0 / 0.11, rel=1e-12)

    def test_temperature_unbounded_at_zero(self):
        m = model_for_target(ParameterTag.TEMPERATURE, n_env=0.0)
        assert noise_rate_bound(m, 5.0).unbounded

    def test_noise_bound_equals_matrix_expectation(self):
        # formula vs 4 tr(rho Ldot^dag Ldot) on Fock-diagonal states
        sp = build_fock_space(40)
        for target in (ParameterTag.LOSS, ParameterTag.TEMPERATURE):
            m = model_for_target(target, gamma=1.3, n_env=0.4)
            rho = diagonal_state(6.5, sp)
            ldots = m.jump_op_derivatives(sp)
            val = 4 * sum(np.trace(rho @ ld.conj().T @ ld).real
                          for ld in ldots)
            report = noise_rate_bound(m, 6.5)
            assert report.rate_bound == pytest.approx(val, abs=1e-10)

    def test_dispatch(self):
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        assert rate_bound(m, 2.0).target is ParameterTag.FREQUENCY
        m = model_for_target(ParameterTag.LOSS, n_env=0.1)
        assert rate_bound(m, 2.0).target is ParameterTag.LOSS

    def test_report_validation(self):
        with pytest.raises(ValueError):
            BoundReport(target=ParameterTag.LOSS, rate_bound=-1.0)
        with pytest.raises(ValueError):
            BoundReport(target=ParameterTag.LOSS, rate_bound=1.0, tau=0.0)


class TestQuadraticBound:
    def test_constant_generator_shortcut(self):
        assert quadratic_bound(2.5, 3.0) == pytest.approx(4 * 9 * 2.5)

    def test_zero_profile(self):
        assert quadratic_bound(lambda t: 0.0, 2.0) == 0.0

    def test_callable_matches_constant(self):
        got = quadratic_bound(lambda t: 2.5, 3.0)
        assert got == pytest.approx(4 * 9 * 2.5, rel=1e-8)

    def test_gaussian_variance_cap(self):
        n_ph, t = 5.0, 0.7
        cap = 2 * n_ph * (n_ph + 1)
        assert quadratic_bound(cap, t) == pytest.approx(8 * t * t * n_ph
                                                        * (n_ph + 1))

    def test_negative_profile_rejected(self):
        with pytest.raises(ValueError):
            quadratic_bound(lambda t: -1.0, 1.0)
        with pytest.raises(ValueError):
            quadratic_bound(-1.0, 1.0)


class TestTheorem1Rate:
    def test_reduces_to_a_expectation_when_constraint_holds(self):
        sp = build_fock_space(60)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        rho = density_from_vector(fock_vector(5, sp))
        res = numeric_h_optimization(m, rho, sp)
        rate = theorem1_rate(rho, res.h, m, qfi_now=123.0, space=sp)
        assert rate == pytest.approx(4 * res.a_expect, rel=1e-6)

    def test_mean_adjusted_scalar_matches_quadratic_growth(self):
        # b = Hdot - <Hdot> gives rate 4 sqrt(Var Hdot * I), the time
        # derivative of the quadratic bound
        sp = build_fock_space(40)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        rho = diagonal_state(3.5, sp)
        mean = np.trace(rho @ sp.number).real
        var = np.trace(rho @ sp.number @ sp.number).real - mean**2
        h0 = HCorrection(-mean, np.zeros(2, complex),
                         np.zeros((2, 2), complex))
        qfi = 17.0
        rate = theorem1_rate(rho, h0, m, qfi, sp)
        assert rate == pytest.approx(4 * math.sqrt(var * qfi), rel=1e-12)

    def test_optimized_wrapper_takes_minimum(self):
        sp = build_fock_space(60)
        m = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
        rho = density_from_vector(fock_vector(5, sp))
        res = numeric_h_optimization(m, rho, sp)
        small_qfi = 1e-6
        rate = theorem1_rate_optimized(rho, m, small_qfi, sp)
        # at tiny current information, the scalar correction beats b = 0
        assert rate <= 4 * res.a_expect
        assert rate <= theorem1_rate(rho, res.h, m, small_qfi, sp) + 1e-9


class TestPassiveTemperatureBounds:
    def test_single_shot_value(self):
        single, _ = passive_temperature_bounds(0.1, 5.0, 0.5)
        assert single == pytest.approx(1.0 / 0.11, rel=1e-12)

    def test_full_thermalization_limit(self):
        single, purif = passive_temperature_bounds(0.1, 5.0, 1e-12)
        assert purif == pytest.approx(single, rel=1e-9)

    def test_short_time_matches_linear_rate(self):
        n_env, n_ph = 0.1, 5.0
        m = model_for_target(ParameterTag.TEMPERATURE, n_env=n_env)
        rate = noise_rate_bound(m, n_ph).rate_bound
        t = 1e-4
        _, purif = passive_temperature_bounds(n_env, n_ph, math.exp(-t))
        assert purif == pytest.approx(rate * t, rel=2e-2)

    def test_identity_channel_limit(self):
        _, purif = passive_temperature_bounds(0.1, 5.0, 1.0)
        assert purif == 0.0

    def test_requires_positive_temperature(self):
        with pytest.raises(ValueError):
            passive_temperature_bounds(0.0, 5.0, 0.5)


class TestJointConsistency:
    def test_hnls_and_infeasibility_agree_for_two_photon_drive(self):
        sp = build_fock_space(40)
        for n_env in (0.0, 0.1):
            m = model_for_target(ParameterTag.SQUEEZING, n_env=n_env)
            escaped = hnls_test(m, sp)
            try:
                numeric_h_optimization(
                    m, density_from_vector(fock_vector(3, sp)), sp)
                feasible = True
            except InfeasibleConstraintError:
                feasible = False
            assert escaped == (not feasible)
