"""
Tests for the dense-matrix primitives.
"""

import numpy as np
import pytest

from functions.exceptions import ContractViolation, InputError
from functions.numerics import (
    as_cmatrix, boundary_alpha, cluster_values, get_tolerance_policy, hermitian_eig,
    is_degenerate, null_space_basis, random_unit_vectors, range_basis, rank_tol,
    spectra_match, svd, unvec, vec
)


class TestTolerancePolicy:
    """Test cases for tolerance resolution."""

    def test_overrides_replace_defaults(self):
        policy = get_tolerance_policy(tol_cert=1e-5, tol_rank=None)
        assert policy.tol_cert == 1e-5
        assert policy.tol_rank > 0

    @pytest.mark.parametrize("value", [0.0, -1e-9, 0.5])
    def test_out_of_range_is_input_error(self, value):
        with pytest.raises(InputError):
            get_tolerance_policy(tol_fixed=value)


class TestVectorization:
    """Test cases for vec and unvec."""

    def test_vec_stacks_columns(self):
        mu = np.array([[1, 2], [3, 4]])
        assert vec(mu).tolist() == [1, 3, 2, 4]
        assert np.array_equal(unvec(vec(mu), 2), mu)

    def test_as_cmatrix_rejects_bad_input(self):
        with pytest.raises(InputError):
            as_cmatrix(np.ones(3))
        with pytest.raises(InputError):
            as_cmatrix([[1.0, np.nan]])


class TestFactorizations:
    """Test cases for SVD, eigendecomposition, rank and bases."""

    def test_svd_reconstructs(self, rng):
        M = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        U, s, V = svd(M)
        assert np.allclose(U @ np.diag(s) @ V.conj().T, M)
        assert np.all(np.diff(s) <= 0)

    def test_hermitian_eig_descending(self):
        values, vectors = hermitian_eig(np.diag([0.2, 0.7, 0.1]))
        assert np.allclose(values, [0.7, 0.2, 0.1])
        assert np.allclose(np.abs(vectors[:, 0]), [0, 1, 0])

    def test_hermitian_eig_rejects_non_hermitian(self):
        with pytest.raises(ContractViolation):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @pytest.mark.parametrize("matrix, expected", [
        (np.zeros((3, 3)), 0),
        (np.diag([1.0, 1e-12]), 1),
        (np.eye(4), 4),
        (np.full((3, 3), 1e-16), 0),
    ])
    def test_rank_tol(self, policy, matrix, expected):
        assert rank_tol(matrix, policy) == expected

    def test_null_space_of_real_matrix_is_real(self, policy):
        kernel = null_space_basis(np.array([[1.0, 1.0]]), policy)
        assert kernel.shape == (2, 1)
        assert np.isrealobj(kernel)
        assert np.allclose(np.array([[1.0, 1.0]]) @ kernel, 0)

    def test_null_space_of_roundoff_matrix_is_everything(self, policy, rng):
        noise = 1e-16 * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        kernel = null_space_basis(noise, policy)
        assert kernel.shape == (4, 4)
        assert np.allclose(kernel.conj().T @ kernel, np.eye(4))

    def test_range_basis_is_orthonormal(self, policy):
        M = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
        basis = range_basis(M, policy)
        assert basis.shape == (3, 1)
        assert np.allclose(basis.conj().T @ basis, np.eye(1))


class TestBoundaryAlpha:
    """Test cases for the PSD boundary step."""

    def test_reaches_boundary(self, policy):
        sigma = np.eye(2) / 2
        delta = np.diag([1.0, -1.0])
        alpha = boundary_alpha(sigma, delta, policy)
        assert alpha == pytest.approx(0.5)
        assert np.min(np.linalg.eigvalsh(sigma + alpha * delta)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("delta", [
        np.diag([1.0, 1.0]),                      # trace
        np.zeros((2, 2)),                         # too small
        np.array([[0.0, 1.0], [0.0, 0.0]]),       # not Hermitian
    ])
    def test_invalid_direction(self, policy, delta):
        with pytest.raises(ContractViolation):
            boundary_alpha(np.eye(2) / 2, delta, policy)

    def test_singular_sigma(self, policy):
        with pytest.raises(ContractViolation):
            boundary_alpha(np.diag([1.0, 0.0]), np.diag([1.0, -1.0]), policy)


class TestClustering:
    """Test cases for spectrum clustering."""

    def test_cluster_values(self):
        clusters = cluster_values([0.2, 0.5, 0.5 + 1e-9], 1e-7)
        assert [count for _, count in clusters] == [2, 1]
        assert clusters[0][0] == pytest.approx(0.5)

    def test_is_degenerate(self):
        assert is_degenerate([0.5, 0.5], 1e-7)
        assert not is_degenerate([0.75, 0.25], 1e-7)
        assert not is_degenerate([1.0], 1e-7)

    def test_spectra_match(self):
        assert spectra_match([0.75, 0.25], [0.25 + 1e-9, 0.75], 1e-7)
        assert not spectra_match([0.75, 0.25], [0.7, 0.3], 1e-7)
        assert not spectra_match([1.0], [0.5, 0.5], 1e-7)

    def test_random_unit_vectors(self, rng):
        vectors = random_unit_vectors(5, 3, rng)
        assert vectors.shape == (5, 3)
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0)
