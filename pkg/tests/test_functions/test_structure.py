"""
Tests for cross-block certification and the global structure.
"""

import numpy as np
import pytest

from config.fixedspace_config import (
    CASE_HALF, CASE_PARTITION, CASE_ZERO, STATUS_CERTIFIED, STATUS_INCONSISTENT, STATUS_UNDETERMINED
)
from functions.channel import apply, superop_from_function
from functions.decompose import block_decomposition
from functions.exceptions import ContractViolation
from functions.projector import fixed_space_basis, principal_angles, spectral_projection
from functions.structure import (
    classify_aligned, classify_cross_case, cptp_structure, cross_block_certificate,
    degenerate_case_experiment, fix_phases, fixed_space_from_form, global_structure
)
from functions.zoo import (
    conditional_expectation_projector, spec_case_projector, structured_cptp, transpose_symmetrizer
)
from models.channel_models import Block, BlockDecomposition, Subspace

R = [0.75, 0.25]


def unit_block(dim: int, index: int) -> Block:
    isometry = np.zeros((dim, 1))
    isometry[index, 0] = 1.0
    return Block(subspace=Subspace(dim_ambient=dim, isometry=isometry), rho=[[1.0]], spectrum=[1.0])


def canonical_pair(m: int):
    basis = np.eye(2 * m, dtype=complex)
    return basis[:, :m], basis[:, m:]


class TestCrossBlockCertificate:
    """Test cases for the pairwise certificate."""

    def test_symmetrizer_scale(self, policy):
        phi = transpose_symmetrizer(2)
        certificate = cross_block_certificate(phi, unit_block(2, 0), unit_block(2, 1), policy)
        assert certificate is not None
        assert certificate.violated is None
        assert certificate.c == pytest.approx(0.5)
        assert certificate.r == pytest.approx([1.0])
        case = classify_cross_case(phi, unit_block(2, 0), unit_block(2, 1), certificate, policy)
        assert case.kind == CASE_HALF

    def test_zero_cross_action(self, policy):
        pinching = conditional_expectation_projector([(1, [1.0]), (1, [1.0])])
        first, second = unit_block(2, 0), unit_block(2, 1)
        assert cross_block_certificate(pinching, first, second, policy) is None
        assert classify_cross_case(pinching, first, second, None, policy).kind == CASE_ZERO

    def test_dimension_mismatch(self, policy):
        phi = conditional_expectation_projector([(1, [0.75, 0.25]), (1, [1.0])])
        dec = block_decomposition(phi, policy)
        with pytest.raises(ContractViolation):
            cross_block_certificate(phi, dec.blocks[0], dec.blocks[1], policy)


class TestClassifyAligned:
    """Test cases for Half / Partition classification on canonical bases."""

    def test_half(self, policy):
        phi = spec_case_projector(2, R, CASE_HALF, 2)
        y, z = canonical_pair(2)
        case = classify_aligned(phi, y, z, R, policy)
        assert case.status == STATUS_CERTIFIED
        assert case.kind == CASE_HALF

    @pytest.mark.parametrize("planted, expected", [
        (([0], [1]), ([0], [1])),
        (([1], [0]), ([0], [1])),
        (([0, 1], []), ([0, 1], [])),
    ])
    def test_partition_keeps_zero_in_first_part(self, policy, planted, expected):
        phi = spec_case_projector(2, R, CASE_PARTITION, 2, planted)
        y, z = canonical_pair(2)
        case = classify_aligned(phi, y, z, R, policy)
        assert case.kind == CASE_PARTITION
        assert tuple(case.partition) == expected

    def test_degenerate_spectrum_is_undetermined(self, policy):
        phi = spec_case_projector(2, R, CASE_HALF, 2)
        y, z = canonical_pair(2)
        case = classify_aligned(phi, y, z, [0.5, 0.5], policy)
        assert case.status == STATUS_UNDETERMINED
        assert case.kind is None

    def test_wrong_spectrum_is_inconsistent(self, policy):
        phi = spec_case_projector(2, R, CASE_HALF, 2)
        y, z = canonical_pair(2)
        case = classify_aligned(phi, y, z, [0.6, 0.4], policy)
        assert case.status == STATUS_INCONSISTENT


class TestGlobalStructure:
    """Test cases for classes of equivalent blocks."""

    @pytest.mark.parametrize("l", [2, 3])
    def test_half_class(self, policy, l):
        phi = spec_case_projector(2, R, CASE_HALF, l)
        report = global_structure(phi, block_decomposition(phi, policy, seed=0), policy)
        assert report.status == STATUS_CERTIFIED
        assert len(report.classes) == 1
        summary = report.classes[0]
        assert (summary.case, summary.l, summary.m) == (CASE_HALF, l, 2)
        assert summary.spectrum == pytest.approx(R)
        assert set(report.pair_cases.values()) == {CASE_HALF}

    def test_partition_class(self, policy):
        phi = spec_case_projector(2, R, CASE_PARTITION, 2, ([0], [1]))
        report = global_structure(phi, block_decomposition(phi, policy, seed=0), policy)
        assert report.status == STATUS_CERTIFIED
        assert report.classes[0].case == CASE_PARTITION
        assert tuple(report.classes[0].partition) == ([0], [1])

    def test_symmetrizer(self, policy):
        phi = transpose_symmetrizer(2)
        report = global_structure(phi, block_decomposition(phi, policy), policy)
        assert report.status == STATUS_CERTIFIED
        assert [(summary.case, summary.l, summary.m) for summary in report.classes] == [(CASE_HALF, 2, 1)]

    def test_non_transitive_connectivity(self, policy):
        def action(mu):
            image = np.diag(np.diag(mu)).astype(complex)
            for a, b in ((0, 1), (1, 2)):
                image[a, b] = image[b, a] = (mu[a, b] + mu[b, a]) / 2
            return image

        phi = superop_from_function(3, action)
        dec = BlockDecomposition(blocks=[unit_block(3, k) for k in range(3)], ambient=Subspace.full(3))
        report = global_structure(phi, dec, policy)
        assert report.status == STATUS_INCONSISTENT
        assert "not transitive" in report.detail

    def test_aligned_bases_are_orthonormal(self, policy):
        phi = spec_case_projector(2, R, CASE_HALF, 2)
        report = global_structure(phi, block_decomposition(phi, policy, seed=0), policy)
        stacked = np.hstack([report.aligned[index] for index in sorted(report.aligned)])
        assert np.allclose(stacked.conj().T @ stacked, np.eye(4), atol=1e-8)


class TestCptpStructure:
    """Test cases for the CPTP tensor-factor form."""

    def test_planted_form(self, policy):
        phi = conditional_expectation_projector([(2, R), (1, [1.0])])
        report = cptp_structure(phi, block_decomposition(phi, policy, seed=0), policy)
        assert report.status == STATUS_CERTIFIED
        form = report.cptp_form
        assert form.fixed_dim == 5
        assert sorted((f.dim_y, f.dim_z) for f in form.factors) == [(1, 1), (2, 2)]
        operators = fixed_space_from_form(report)
        assert len(operators) == 5
        for op in operators:
            assert np.allclose(apply(phi, op), op, atol=1e-8)

    @pytest.mark.parametrize("seed", [0, 9])
    def test_form_spans_fixed_space_of_rotated_channel(self, policy, seed):
        psi = structured_cptp([(2, 2), (1, 1)], 3, seed, rotate=True)
        phi = spectral_projection(psi, policy)
        report = cptp_structure(phi, block_decomposition(phi, policy, seed=0), policy)
        assert report.status == STATUS_CERTIFIED
        operators = fixed_space_from_form(report)
        assert len(operators) == 5
        from_form = np.column_stack([op.reshape(-1, order="F") for op in operators])
        angles = principal_angles(from_form, fixed_space_basis(psi, policy).vectors())
        assert len(angles) == 5
        assert np.max(angles) <= 1e-6

    def test_degenerate_spectrum_full_partition(self, policy):
        phi = conditional_expectation_projector([(2, [0.5, 0.5])])
        report = cptp_structure(phi, block_decomposition(phi, policy, seed=0), policy)
        assert report.status == STATUS_CERTIFIED
        assert report.cptp_form.fixed_dim == 4
        assert tuple(report.classes[0].partition) == ([0, 1], [])

    def test_requires_complete_positivity(self, policy):
        phi = transpose_symmetrizer(2)
        with pytest.raises(ContractViolation):
            cptp_structure(phi, block_decomposition(phi, policy), policy)

    def test_degenerate_experiment_records(self, policy):
        phi = conditional_expectation_projector([(2, [0.5, 0.5])])
        records = degenerate_case_experiment(phi, block_decomposition(phi, policy, seed=0), policy)
        assert len(records) == 1
        assert records[0]["cross_action"]


class TestFixPhases:
    """Test cases for the phase convention."""

    def test_first_component_real_positive(self):
        vectors = np.array([[0.0, 1j], [-1j, 1.0]]) / 1.0
        fixed = fix_phases(vectors)
        assert fixed[1, 0] == pytest.approx(1.0)
        assert fixed[0, 1] == pytest.approx(1.0)
        assert np.allclose(np.abs(fixed), np.abs(vectors))
