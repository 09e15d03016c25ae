"""
Tests for fixed spaces and projections.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from functions.channel import apply, build_superop, conjugate_by_unitary
from functions.exceptions import PositivityViolation
from functions.projector import (
    cesaro_projection, fixed_space_basis, hermitian_fixed_basis, idempotence_residual,
    is_idempotent, principal_angles, projection_image, spectral_norm_check,
    spectral_projection, spectral_radius, support_subspace
)
from functions.zoo import (
    amplitude_damping, conditional_expectation_projector, depolarizing, haar_unitary, random_cptp,
    transpose_map, transpose_symmetrizer, unitary_channel
)
from models.channel_models import FixedSpace

PINCHING_PHASES = [0.0, np.pi / 3, np.pi / 5]


class TestFixedSpace:
    """Test cases for fixed-space bases."""

    @pytest.mark.parametrize("channel, expected", [
        (depolarizing(3, 0.5), 1),
        (amplitude_damping(0.4), 1),
        (unitary_channel(np.diag(np.exp(1j * np.array(PINCHING_PHASES)))), 3),
        (transpose_map(2), 3),
        (conditional_expectation_projector([(2, [0.75, 0.25]), (1, [1.0])]), 5),
    ])
    def test_dimension(self, policy, channel, expected):
        fixed = fixed_space_basis(channel, policy)
        assert fixed.dim == expected
        vectors = fixed.vectors()
        assert np.allclose(vectors.conj().T @ vectors, np.eye(expected))
        for op in fixed.basis:
            assert np.allclose(apply(channel, op), op)

    def test_map_without_fixed_point(self, policy):
        assert fixed_space_basis(build_superop(2, natural=np.zeros((4, 4))), policy).dim == 0

    @pytest.mark.parametrize("dim", [2, 3])
    def test_rotated_identity_fixes_everything(self, policy, rng, dim):
        identity = conjugate_by_unitary(unitary_channel(np.eye(dim)), haar_unitary(dim, rng))
        fixed = fixed_space_basis(identity, policy)
        assert fixed.dim == dim * dim
        assert fixed.residual < 1e-12
        assert len(hermitian_fixed_basis(identity, policy)) == dim * dim

    def test_residual_is_recorded(self, policy):
        fixed = fixed_space_basis(depolarizing(3, 0.5), policy)
        assert 0.0 <= fixed.residual < policy.tol_fixed

    def test_basis_must_be_orthonormal(self):
        with pytest.raises(ValidationError):
            FixedSpace(dim_ambient=2, basis=[np.eye(2)])
        with pytest.raises(ValidationError):
            FixedSpace(dim_ambient=2, basis=[np.eye(3) / np.sqrt(3)])
        assert FixedSpace(dim_ambient=2, basis=[np.eye(2) / np.sqrt(2)]).dim == 1

    def test_hermitian_fixed_basis(self, policy):
        pinching = unitary_channel(np.diag(np.exp(1j * np.array(PINCHING_PHASES))))
        basis = hermitian_fixed_basis(pinching, policy)
        assert len(basis) == 3
        for op in basis:
            assert np.allclose(op, op.conj().T)
            assert np.allclose(op, np.diag(np.diag(op)))


class TestProjection:
    """Test cases for the spectral and Cesaro projections."""

    def test_depolarizing_projection(self, policy):
        phi = spectral_projection(depolarizing(3, 0.5), policy)
        assert is_idempotent(phi, policy)
        mu = np.diag([1.0, 0.0, 0.0]) + np.ones((3, 3))
        assert np.allclose(apply(phi, mu), np.trace(mu) * np.eye(3) / 3)

    def test_amplitude_damping_projection(self, policy):
        phi = spectral_projection(amplitude_damping(0.4), policy)
        assert np.allclose(apply(phi, np.eye(2) / 2), np.diag([1.0, 0.0]))

    def test_transpose_projects_onto_symmetrizer(self, policy):
        phi = spectral_projection(transpose_map(2), policy)
        assert np.allclose(phi.natural, transpose_symmetrizer(2).natural)

    def test_idempotent_input_is_fixed(self, policy):
        projector = conditional_expectation_projector([(2, [0.75, 0.25])])
        assert idempotence_residual(projector) < 1e-12
        assert np.allclose(spectral_projection(projector, policy).natural, projector.natural)

    def test_map_without_fixed_point_projects_to_zero(self, policy):
        phi = spectral_projection(build_superop(2, natural=0.5 * np.eye(4)), policy)
        assert np.allclose(phi.natural, 0.0)

    def test_cesaro_matches_spectral(self, policy):
        result = cesaro_projection(transpose_map(2), policy)
        assert result.converged
        assert result.terms == 2
        spectral = spectral_projection(transpose_map(2), policy)
        assert np.allclose(result.projection.natural, spectral.natural)
        angles = principal_angles(projection_image(result.projection, policy), projection_image(spectral, policy))
        assert np.max(angles) < 1e-8

    @pytest.mark.parametrize("dim, seed", [(d, s) for d in (2, 3, 4, 5) for s in range(5)])
    def test_random_channel_projection_laws(self, policy, dim, seed):
        psi = random_cptp(dim, 2, seed)
        P, N = spectral_projection(psi, policy).natural, psi.natural
        assert np.linalg.norm(P @ P - P) <= 1e-8
        assert np.linalg.norm(P @ N - P) <= 1e-8
        assert np.linalg.norm(N @ P - P) <= 1e-8

    @pytest.mark.parametrize("psi", [
        random_cptp(3, 2, 11),
        random_cptp(4, 3, 12),
        depolarizing(3, 0.5),
        amplitude_damping(0.4),
        transpose_map(3),
        unitary_channel(np.diag(np.exp(1j * np.array(PINCHING_PHASES)))),
    ])
    def test_image_is_fixed_space(self, policy, psi):
        phi = spectral_projection(psi, policy)
        fixed = fixed_space_basis(psi, policy)
        image = projection_image(phi, policy)
        assert image.shape[1] == fixed.dim
        assert np.max(principal_angles(image, fixed.vectors())) <= 1e-8

    def test_cesaro_agrees_with_spectral_on_depolarizing(self, policy):
        psi = depolarizing(2, 0.5)
        result = cesaro_projection(psi, policy)
        assert result.converged
        assert result.terms == 2 ** 21
        gap = np.linalg.norm(result.projection.natural - spectral_projection(psi, policy).natural)
        assert gap <= max(1e-6, 10 * result.residual)

    def test_cesaro_reports_non_convergence(self, policy):
        result = cesaro_projection(depolarizing(2, 0.1), policy, max_terms=4)
        assert not result.converged
        assert result.terms == 4


class TestSupport:
    """Test cases for the support of a projection."""

    def test_transient_dimension_is_outside(self, policy):
        projector = conditional_expectation_projector([(1, [0.75, 0.25])], transient=1)
        support = support_subspace(projector, policy)
        assert support.dim == 2
        assert np.allclose(support.projector(), np.diag([1.0, 1.0, 0.0]))

    def test_negative_image_of_identity(self, policy):
        with pytest.raises(PositivityViolation):
            support_subspace(build_superop(2, natural=-np.eye(4)), policy)

    def test_spectral_norm(self):
        assert spectral_norm_check(depolarizing(2, 0.5)) == pytest.approx(1.0)
        assert spectral_norm_check(build_superop(2, natural=2 * np.eye(4))) == pytest.approx(2.0)

    def test_non_unital_channel_exceeds_norm_but_not_radius(self):
        channel = amplitude_damping(1.0)
        assert spectral_norm_check(channel) == pytest.approx(np.sqrt(2.0))
        assert spectral_radius(channel) == pytest.approx(1.0)
