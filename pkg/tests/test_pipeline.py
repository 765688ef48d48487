import numpy as np
import pytest

from hhlsim.errors import (
    IndefiniteMatrix,
    ZeroEigenvalueBin,
    ZeroVector,
)
from hhlsim.hamiltonian import ExactEvolution
from hhlsim.linalg import ProblemInstance, hermitian_eigendecomposition
from hhlsim.pipeline import (
    HhlConfig,
    amplitude_encode,
    config_from_json,
    config_to_json,
    eigenvalue_inversion,
    expected_outcome_distribution,
    prepare_b,
    resolve_config,
    result_from_json,
    result_to_json,
    run_hhl,
)
from hhlsim.qpe import phase_estimation
from hhlsim.statevector import RegisterLayout, init_state, marginal_probabilities
from hhlsim.sweep import demo_problem

DEMO = np.array([[1.0, -0.5], [-0.5, 1.0]], dtype=complex)


class TestAmplitudeEncoding:
    def test_basis_vector(self):
        np.testing.assert_allclose(amplitude_encode([1.0, 0.0]), [1.0, 0.0], atol=1e-14)

    def test_uniform(self):
        amps = amplitude_encode(np.ones(8))
        np.testing.assert_allclose(amps, np.full(8, 1 / np.sqrt(8)), atol=1e-12)

    def test_three_four_five(self):
        np.testing.assert_allclose(amplitude_encode([3.0, 4.0]), [0.6, 0.8], atol=1e-12)

    def test_complex_phases_exact(self):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        np.testing.assert_allclose(amplitude_encode(v), v / np.linalg.norm(v), atol=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            amplitude_encode(np.zeros(4))

    def test_prepare_b_leaves_other_registers_cleared(self):
        layout = RegisterLayout(n_clock=2, n_data=1)
        state = prepare_b(init_state(layout), np.array([3.0, 4.0]))
        np.testing.assert_allclose(state.amplitudes[:2], [0.6, 0.8], atol=1e-12)
        assert np.all(state.amplitudes[2:] == 0)


class TestEigenvalueInversion:
    def _post_qpe_state(self, matrix, b, n_c, t):
        layout = RegisterLayout(n_clock=n_c, n_data=1)
        state = init_state(layout)
        prepare_b(state, b)
        phase_estimation(state, ExactEvolution(matrix), n_c, t)
        return state, layout

    def test_bin_equal_to_c_fully_rotates(self):
        # single populated bin at lambda = 1 with C = 1: arcsin(1) = pi/2
        state, layout = self._post_qpe_state(np.diag([1.0, 1.0]), [1.0, 0.0], 2, 2 * np.pi / 4)
        eigenvalue_inversion(state, 1.0, 2, 2 * np.pi / 4)
        probs = marginal_probabilities(state, [layout.ancilla_qubit])
        assert probs[1] == pytest.approx(1.0, abs=1e-10)

    def test_demo_amplitude_ratio_three_to_one(self):
        # C = 0.5 on eigenvalues (0.5, 1.5): ancilla-1 amplitudes in ratio 3:1
        state, layout = self._post_qpe_state(DEMO, [1.0, 0.0], 2, np.pi)
        eigenvalue_inversion(state, 0.5, 2, np.pi)
        bins = 1 << 2
        arr = state.amplitudes.reshape(2, bins, 2)
        amp_low = np.linalg.norm(arr[1, 1, :])  # bin 1 = eigenvalue 0.5 branch
        amp_high = np.linalg.norm(arr[1, 3, :])  # bin 3 = eigenvalue 1.5 branch
        assert amp_low / amp_high == pytest.approx(3.0, abs=1e-9)

    def test_half_ratio_quarter_probability(self):
        # C / lambda = 0.5 on the only populated bin: ancilla-1 mass = 0.25
        state, layout = self._post_qpe_state(np.diag([2.0, 2.0]), [1.0, 0.0], 2, 2 * np.pi / 4)
        eigenvalue_inversion(state, 1.0, 2, 2 * np.pi / 4)
        probs = marginal_probabilities(state, [layout.ancilla_qubit])
        assert probs[1] == pytest.approx(0.25, abs=1e-10)

    def test_populated_zero_bin_rejected(self):
        # eigenvalue 0 on a populated eigenvector drops mass onto bin 0
        state, _ = self._post_qpe_state(np.diag([0.0, 2.0]), [1.0, 1.0], 2, 2 * np.pi / 4)
        with pytest.raises(ZeroEigenvalueBin):
            eigenvalue_inversion(state, 1.0, 2, 2 * np.pi / 4)

    def test_invalid_constant(self):
        state, _ = self._post_qpe_state(np.diag([1.0, 1.0]), [1.0, 0.0], 2, 2 * np.pi / 4)
        with pytest.raises(ValueError):
            eigenvalue_inversion(state, -0.1, 2, 2 * np.pi / 4)


class TestRunHhlDemo:
    def test_solution_and_probabilities(self):
        result = run_hhl(demo_problem(), HhlConfig(method="exact"))
        expected = np.array([2.0, 1.0]) / np.sqrt(5.0)
        np.testing.assert_allclose(np.abs(result.solution_amplitudes), expected, atol=1e-10)
        probs = np.abs(result.solution_amplitudes) ** 2
        np.testing.assert_allclose(probs, [0.8, 0.2], atol=1e-10)
        assert probs[0] / probs[1] == pytest.approx(4.0, abs=1e-8)
        assert result.fidelity >= 1 - 1e-10

    def test_success_probability_formula(self):
        # beta = (1, 1)/sqrt(2) over eigenvalues (0.5, 1.5)
        config = HhlConfig(method="exact", C=0.45)
        result = run_hhl(demo_problem(), config)
        expected = 0.45**2 * (0.5 / 0.25 + 0.5 / 2.25)
        assert result.success_probability == pytest.approx(expected, abs=1e-9)
        assert result.post_norm == pytest.approx(0.45 / np.sqrt(expected), abs=1e-9)

    def test_demo_resolves_exact_bins(self):
        result = run_hhl(demo_problem(), HhlConfig(method="exact"))
        assert result.resolved.n_c == 2
        assert result.resolved.t == pytest.approx(np.pi)
        assert result.clock_residual <= 1e-10


class TestRunHhlGeneral:
    def test_identity_problem(self):
        rng = np.random.default_rng(3)
        b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        problem = ProblemInstance.from_arrays(np.eye(4), b)
        result = run_hhl(problem, HhlConfig(method="exact", C=0.7))
        assert result.fidelity >= 1 - 1e-10
        assert result.success_probability == pytest.approx(0.49, abs=1e-9)
        np.testing.assert_allclose(
            result.solution_amplitudes * np.linalg.norm(b), b, atol=1e-8
        )

    def test_random_representable_oracle_equivalence(self):
        # integer spectra are exactly representable: the pipeline is algebraic
        rng = np.random.default_rng(10)
        for _ in range(5):
            values = rng.integers(2, 15, size=8).astype(float)
            z = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
            q, _ = np.linalg.qr(z)
            a = (q * values) @ q.conj().T
            a = (a + a.conj().T) / 2
            b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            problem = ProblemInstance.from_arrays(a, b)
            result = run_hhl(problem, HhlConfig(method="exact"))
            assert result.fidelity >= 1 - 1e-8

    def test_rescaling_invariance(self):
        problem = demo_problem()
        scaled = ProblemInstance.from_arrays(problem.matrix, problem.rhs * (2.0 - 1.5j))
        r1 = run_hhl(problem, HhlConfig(method="exact"))
        r2 = run_hhl(scaled, HhlConfig(method="exact"))
        assert abs(r1.fidelity - r2.fidelity) <= 1e-10
        np.testing.assert_allclose(
            np.abs(r1.solution_amplitudes), np.abs(r2.solution_amplitudes), atol=1e-10
        )
        assert r1.success_probability == pytest.approx(r2.success_probability, abs=1e-10)

    def test_success_probability_never_exceeds_one(self):
        rng = np.random.default_rng(4)
        for seed in range(5):
            values = rng.integers(2, 12, size=4).astype(float)
            a = np.diag(values)
            b = rng.standard_normal(4)
            result = run_hhl(ProblemInstance.from_arrays(a, b), HhlConfig(method="exact"))
            assert 0.0 < result.success_probability <= 1.0

    def test_indefinite_rejected(self):
        problem = ProblemInstance.from_arrays(np.diag([-1.0, 2.0]), np.array([1.0, 1.0]))
        with pytest.raises(IndefiniteMatrix):
            run_hhl(problem, HhlConfig(method="exact"))

    def test_mis_scaled_time_rejected(self):
        # explicit t pushing eigenvalues past the top bin wraps onto bin 0
        with pytest.raises(ZeroEigenvalueBin):
            run_hhl(demo_problem(), HhlConfig(method="exact", n_c=2, t=2 * np.pi))

    def test_explicit_c_validated(self):
        with pytest.raises(ValueError):
            run_hhl(demo_problem(), HhlConfig(method="exact", C=0.8))  # above lambda_min

    def test_trotter_fidelity_non_decreasing_in_steps(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((4, 4))
        a = (a + a.T) / 2 + 4 * np.eye(4)
        problem = ProblemInstance.from_arrays(a, rng.standard_normal(4))
        fids = []
        for steps in (1, 2, 4, 8, 16):
            result = run_hhl(problem, HhlConfig(method="trotter", trotter_steps=steps, trotter_order=2))
            fids.append(result.fidelity)
        floor = 1 - 1e-9
        for prev, cur in zip(fids, fids[1:]):
            assert cur >= prev - 1e-12 or cur >= floor

    def test_clock_residual_reported_for_off_grid(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((4, 4))
        a = (a + a.T) / 2 + 4 * np.eye(4)
        problem = ProblemInstance.from_arrays(a, rng.standard_normal(4))
        result = run_hhl(problem, HhlConfig(method="exact"))
        assert result.clock_residual > 0.0
        assert result.fidelity > 0.9


class TestExpectedOutcomeDistribution:
    def test_demo(self):
        np.testing.assert_allclose(
            expected_outcome_distribution(demo_problem()), [0.8, 0.2], atol=1e-12
        )

    def test_identity(self):
        problem = ProblemInstance.from_arrays(np.eye(2), np.array([1.0, 0.0]))
        np.testing.assert_allclose(expected_outcome_distribution(problem), [1.0, 0.0], atol=1e-14)

    def test_diag_hand_solved(self):
        problem = ProblemInstance.from_arrays(
            np.diag([1.0, 2.0]), np.array([1.0, 1.0]) / np.sqrt(2)
        )
        np.testing.assert_allclose(expected_outcome_distribution(problem), [0.8, 0.2], atol=1e-12)


class TestConfigResolution:
    def test_auto_clock_width_demo(self):
        resolved = resolve_config(demo_problem(), HhlConfig())
        assert resolved.n_c == 2
        assert resolved.t == pytest.approx(np.pi)
        assert resolved.C == pytest.approx(0.45)

    def test_fallback_for_off_grid(self):
        rng = np.random.default_rng(8)
        a = rng.standard_normal((4, 4))
        a = (a + a.T) / 2 + 4 * np.eye(4)
        problem = ProblemInstance.from_arrays(a, rng.standard_normal(4))
        resolved = resolve_config(problem, HhlConfig())
        assert resolved.n_c == 6
        lam_max = float(np.max(hermitian_eigendecomposition(a).eigenvalues))
        assert resolved.t == pytest.approx(2 * np.pi * 63 / (64 * lam_max))


class TestSerialization:
    def test_config_round_trip(self):
        config = HhlConfig(n_c=3, t=1.5, C=0.4, method="trotter", trotter_steps=5, seed=7)
        assert config_from_json(config_to_json(config)) == config

    def test_config_defaults_for_missing_fields(self):
        config = config_from_json({"method": "block"})
        assert config.method == "block"
        assert config.shots == 10_000

    def test_result_round_trip(self):
        result = run_hhl(demo_problem(), HhlConfig(method="exact"))
        again = result_from_json(result_to_json(result))
        np.testing.assert_allclose(again.solution_amplitudes, result.solution_amplitudes)
        assert again.fidelity == result.fidelity
        assert again.cost == result.cost
        assert again.resolved == result.resolved
