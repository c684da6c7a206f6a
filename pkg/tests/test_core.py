import math

import numpy as np
import pytest

from bosonic_metrology.core import (
    FisherDivergenceError,
    GaussianState,
    Hamiltonian,
    HamiltonianKind,
    LindbladModel,
    OutcomeDistribution,
    ParameterTag,
    build_fock_space,
    check_density_matrix,
    default_cutoff,
    make_gaussian,
    model_for_target,
    photon_number,
)


class TestPhotonNumber:
    def test_vacuum(self):
        assert photon_number(GaussianState.vacuum()) == 0.0

    def test_coherent(self):
        # mean (2a, 0) with identity covariance carries a^2 photons
        alpha = 1.7
        st = GaussianState(mean=[2 * alpha, 0.0], cov=np.eye(2))
        assert photon_number(st) == pytest.approx(alpha**2, abs=1e-12)

    def test_squeezed_vacuum(self):
        r = 0.8
        st = GaussianState(mean=np.zeros(2),
                           cov=np.diag([math.exp(-2 * r), math.exp(2 * r)]))
        assert photon_number(st) == pytest.approx(math.sinh(r) ** 2,
                                                  abs=1e-12)


class TestMakeGaussian:
    def test_vacuum(self):
        st = make_gaussian(0.0, 0.0)
        assert np.allclose(st.mean, 0.0)
        assert np.allclose(st.cov, np.eye(2))

    def test_p_displaced_x_squeezed(self):
        alpha, r = 1.3, 0.6
        st = make_gaussian(1j * alpha, r)
        assert np.allclose(st.mean, [0.0, 2 * alpha])
        assert np.allclose(st.cov,
                           np.diag([math.exp(-2 * r), math.exp(2 * r)]))

    def test_x_displaced_x_squeezed(self):
        alpha, r = 0.9, 0.4
        st = make_gaussian(alpha, r)
        assert np.allclose(st.mean, [2 * alpha, 0.0])
        assert np.allclose(st.cov,
                           np.diag([math.exp(-2 * r), math.exp(2 * r)]))

    def test_negative_squeeze_rejected(self):
        with pytest.raises(ValueError):
            make_gaussian(0.0, -0.1)

    def test_photon_number_and_uncertainty_random(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            alpha = rng.standard_normal() + 1j * rng.standard_normal()
            r = abs(rng.standard_normal())
            axis = rng.uniform(0.0, math.pi)
            st = make_gaussian(alpha, r, axis)
            expect = abs(alpha) ** 2 + math.sinh(r) ** 2
            assert photon_number(st) == pytest.approx(expect, abs=1e-12)
            assert np.linalg.det(st.cov) >= 1.0 - 1e-10


class TestGaussianStateValidation:
    def test_asymmetric_cov_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            GaussianState(mean=np.zeros(2),
                          cov=np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_subvacuum_cov_rejected(self):
        with pytest.raises(ValueError, match="unphysical"):
            GaussianState(mean=np.zeros(2), cov=0.5 * np.eye(2))

    def test_immutable(self):
        st = GaussianState.vacuum()
        with pytest.raises(ValueError):
            st.mean[0] = 1.0


class TestFockSpace:
    def test_qubit_truncation(self):
        sp = build_fock_space(2)
        assert np.array_equal(sp.lowering, np.array([[0, 1], [0, 0]],
                                                    dtype=complex))

    def test_commutator_interior(self):
        sp = build_fock_space(30)
        comm = sp.lowering @ sp.raising - sp.raising @ sp.lowering
        assert np.linalg.norm(comm[:-1, :-1] - np.eye(29)) < 1e-12

    def test_number_diagonal(self):
        sp = build_fock_space(17)
        assert np.allclose(np.diag(sp.number), np.arange(17))

    def test_raising_is_exact_adjoint(self):
        sp = build_fock_space(9)
        assert np.array_equal(sp.raising, sp.lowering.conj().T)

    def test_small_cutoff_rejected(self):
        with pytest.raises(ValueError):
            build_fock_space(1)

    def test_default_cutoff_heuristic(self):
        assert default_cutoff(0.0) == 30
        assert default_cutoff(10.0) == math.ceil(10 + 10 * math.sqrt(11)
                                                 + 20)


class TestLindbladModel:
    def test_jump_operator_count(self):
        m0 = model_for_target(ParameterTag.LOSS, n_env=0.0)
        m1 = model_for_target(ParameterTag.LOSS, n_env=0.4)
        assert m0.n_jump_ops == 1
        assert m1.n_jump_ops == 2

    def test_jump_operator_values(self):
        sp = build_fock_space(8)
        m = model_for_target(ParameterTag.LOSS, gamma=2.0, n_env=0.5)
        l1, l2 = m.jump_ops(sp)
        assert np.allclose(l1, math.sqrt(2.0 * 1.5) * sp.lowering)
        assert np.allclose(l2, math.sqrt(2.0 * 0.5) * sp.raising)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            model_for_target(ParameterTag.LOSS, gamma=0.0)
        with pytest.raises(ValueError):
            model_for_target(ParameterTag.LOSS, n_env=-0.1)

    def test_hamiltonian_variants(self):
        sp = build_fock_space(6)
        m = LindbladModel(hamiltonian=Hamiltonian.frequency(0.3),
                          target=ParameterTag.FREQUENCY)
        assert np.allclose(m.hamiltonian_matrix(sp), 0.3 * sp.number)
        m = LindbladModel(hamiltonian=Hamiltonian.displacement(0.7),
                          target=ParameterTag.DISPLACEMENT)
        h = m.hamiltonian_matrix(sp)
        assert np.allclose(h, 0.7j * (sp.raising - sp.lowering))
        assert np.allclose(h, h.conj().T)

    def test_none_kind_carries_no_coefficient(self):
        with pytest.raises(ValueError):
            Hamiltonian(HamiltonianKind.NONE, 0.3)
        with pytest.raises(ValueError):
            Hamiltonian.frequency(math.nan)

    def test_generator_derivative(self):
        sp = build_fock_space(6)
        m = model_for_target(ParameterTag.SQUEEZING, n_env=0.2)
        expect = sp.lowering @ sp.lowering + sp.raising @ sp.raising
        assert np.allclose(m.generator_derivative(sp), expect)
        noise = model_for_target(ParameterTag.LOSS, n_env=0.2)
        assert np.allclose(noise.generator_derivative(sp), 0.0)

    def test_temperature_derivative_requires_positive_n(self):
        sp = build_fock_space(6)
        m = model_for_target(ParameterTag.TEMPERATURE, n_env=0.0)
        with pytest.raises(ValueError):
            m.jump_op_derivatives(sp)


class TestOutcomeDistribution:
    def test_tiny_negative_clamped(self):
        dist = OutcomeDistribution(labels=np.arange(2),
                                   probs=np.array([1.0, -5e-13]),
                                   dprobs=np.array([0.5, -0.5]))
        assert dist.probs[1] == 0.0

    def test_large_negative_rejected(self):
        with pytest.raises(ValueError, match="clamp"):
            OutcomeDistribution(labels=np.arange(2),
                                probs=np.array([1.0, -1e-9]),
                                dprobs=np.zeros(2))

    def test_probability_deficit_beyond_tail_rejected(self):
        with pytest.raises(ValueError, match="sum"):
            OutcomeDistribution(labels=np.arange(2),
                                probs=np.array([0.5, 0.4]),
                                dprobs=np.zeros(2))

    def test_derivative_sum_must_vanish(self):
        with pytest.raises(ValueError, match="derivative"):
            OutcomeDistribution(labels=np.arange(2),
                                probs=np.array([0.5, 0.5]),
                                dprobs=np.array([0.5, 0.0]))

    def test_merge(self):
        dist = OutcomeDistribution(labels=np.arange(4),
                                   probs=np.array([0.1, 0.2, 0.3, 0.4]),
                                   dprobs=np.array([0.1, -0.1, 0.2, -0.2]))
        parity = dist.merged(dist.labels % 2)
        assert np.allclose(parity.probs, [0.4, 0.6])
        assert np.allclose(parity.dprobs, [0.3, -0.3])


class TestDensityValidation:
    def test_accepts_valid(self):
        check_density_matrix(np.diag([0.25, 0.75]).astype(complex))

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            check_density_matrix(np.diag([0.5, 0.6]).astype(complex))

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="negative"):
            check_density_matrix(np.diag([1.1, -0.1]).astype(complex))

    def test_fisher_divergence_error_exists(self):
        assert issubclass(FisherDivergenceError, RuntimeError)
