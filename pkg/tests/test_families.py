import numpy as np
import pytest

from hhlsim.errors import InfeasibleSpec
from hhlsim.families import FamilySpec, family_census, generate
from hhlsim.linalg import ProblemInstance, hermitian_eigendecomposition, max_asymmetry
from hhlsim.pipeline import HhlConfig, run_hhl

DEMO = np.array([[1.0, -0.5], [-0.5, 1.0]], dtype=complex)


def spec(family, dim, seed=0, **kw):
    return FamilySpec(family=family, dim=dim, seed=seed, **kw)


class TestDeterminism:
    @pytest.mark.parametrize("family,dim", [("diagonal", 8), ("tridiagonal", 8), ("moderate", 16), ("dense", 8)])
    def test_same_seed_bit_identical(self, family, dim):
        a = generate(spec(family, dim, seed=5))
        b = generate(spec(family, dim, seed=5))
        assert np.array_equal(a.matrix, b.matrix)
        assert np.array_equal(a.rhs, b.rhs)

    def test_different_seeds_differ(self):
        a = generate(spec("dense", 8, seed=1))
        b = generate(spec("dense", 8, seed=2))
        assert not np.array_equal(a.matrix, b.matrix)


class TestStructure:
    def test_diagonal_is_diagonal(self):
        problem = generate(spec("diagonal", 16, seed=3))
        off = problem.matrix - np.diag(np.diagonal(problem.matrix))
        assert np.max(np.abs(off)) == 0.0

    def test_tridiagonal_bandwidth(self):
        problem = generate(spec("tridiagonal", 16, seed=4))
        for i in range(16):
            for j in range(16):
                if abs(i - j) > 1:
                    assert problem.matrix[i, j] == 0.0
        assert family_census(problem)["nnz_per_row_max"] <= 3

    def test_moderate_row_budget(self):
        for dim in (8, 16, 32):
            problem = generate(spec("moderate", dim, seed=6))
            nnz = np.count_nonzero(np.abs(problem.matrix) > 1e-12, axis=1)
            assert np.all(nnz >= 3)
            assert np.all(nnz < dim // 2)

    def test_moderate_density_knob(self):
        problem = generate(spec("moderate", 32, seed=7, nnz_per_row=5))
        nnz = np.count_nonzero(np.abs(problem.matrix) > 1e-12, axis=1)
        assert np.max(nnz) <= 5

    def test_dense_is_dense(self):
        problem = generate(spec("dense", 8, seed=8))
        assert family_census(problem)["nnz_per_row_max"] == 8


class TestSpectra:
    @pytest.mark.parametrize("family,dim", [("diagonal", 8), ("tridiagonal", 8), ("moderate", 16), ("dense", 8)])
    def test_hermitian_positive_definite(self, family, dim):
        problem = generate(spec(family, dim, seed=9))
        assert max_asymmetry(problem.matrix) <= 1e-12
        eigs = hermitian_eigendecomposition(problem.matrix).eigenvalues
        assert np.min(eigs) > 0

    @pytest.mark.parametrize("family,dim", [("diagonal", 8), ("tridiagonal", 8), ("moderate", 16), ("dense", 8)])
    def test_kappa_within_ten_percent(self, family, dim):
        for seed in range(5):
            problem = generate(spec(family, dim, seed=seed, kappa_target=5.0))
            assert family_census(problem)["kappa"] == pytest.approx(5.0, rel=0.1)

    def test_grid_spectra_are_integers(self):
        problem = generate(spec("dense", 8, seed=10))
        eigs = hermitian_eigendecomposition(problem.matrix).eigenvalues
        np.testing.assert_allclose(eigs, np.round(eigs), atol=1e-9)

    def test_off_grid_spectra(self):
        problem = generate(spec("dense", 8, seed=10, representable=False))
        eigs = hermitian_eigendecomposition(problem.matrix).eigenvalues
        assert np.max(np.abs(eigs - np.round(eigs))) > 1e-6

    def test_rhs_unit_norm(self):
        problem = generate(spec("dense", 8, seed=11))
        assert np.linalg.norm(problem.rhs) == pytest.approx(1.0, abs=1e-12)


class TestCensus:
    def test_identity(self):
        problem = ProblemInstance.from_arrays(np.eye(4), np.ones(4))
        census = family_census(problem)
        assert census["nnz_per_row_max"] == 1
        assert census["kappa"] == pytest.approx(1.0)

    def test_demo_matrix(self):
        problem = ProblemInstance.from_arrays(DEMO, np.array([1.0, 0.0]))
        census = family_census(problem)
        assert census["nnz_per_row_max"] == 2
        assert census["kappa"] == pytest.approx(3.0)
        assert census["spectral_range"] == pytest.approx((0.5, 1.5))

    def test_generated_dense(self):
        problem = generate(spec("dense", 8, seed=12))
        assert family_census(problem)["nnz_per_row_max"] == 8


class TestValidation:
    def test_bad_kappa(self):
        with pytest.raises(InfeasibleSpec):
            FamilySpec(family="diagonal", dim=4, seed=0, kappa_target=0.5)

    def test_bad_dimension(self):
        with pytest.raises(InfeasibleSpec):
            FamilySpec(family="diagonal", dim=6, seed=0)

    def test_unknown_family(self):
        with pytest.raises(InfeasibleSpec):
            FamilySpec(family="toeplitz", dim=4, seed=0)

    def test_structural_families_cannot_be_gridded(self):
        with pytest.raises(InfeasibleSpec):
            generate(spec("tridiagonal", 8, representable=True))
        with pytest.raises(InfeasibleSpec):
            generate(spec("moderate", 16, representable=True))

    def test_moderate_needs_dim_eight(self):
        with pytest.raises(InfeasibleSpec):
            generate(spec("moderate", 4))


class TestEndToEnd:
    def test_representable_instances_run_exactly(self):
        # grid spectra + exact backend: clock must fully uncompute
        for family in ("diagonal", "dense"):
            problem = generate(spec(family, 4, seed=13))
            result = run_hhl(problem, HhlConfig(method="exact"))
            assert result.clock_residual <= 1e-10
            assert result.fidelity >= 1 - 1e-8
