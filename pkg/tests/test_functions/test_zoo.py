"""
Tests for the channel and projector generators.
"""

import numpy as np
import pytest

from config.fixedspace_config import CASE_HALF, CASE_PARTITION
from functions.channel import apply, classify, positivity_falsifier
from functions.exceptions import InputError
from functions.projector import fixed_space_basis, idempotence_residual, spectral_radius
from functions.zoo import (
    builtin_channel, conditional_expectation_projector, corpus, random_cptp,
    spec_case_projector, structured_cptp, transpose_symmetrizer
)
from models.report_models import ZooSpec


class TestBuiltinChannel:
    """Test cases for ZooSpec-driven generation."""

    @pytest.mark.parametrize("params, dim", [
        ({"kind": "depolarizing", "dim": 3, "p": 0.5}, 3),
        ({"kind": "dephasing", "dim": 2, "p": 0.3}, 2),
        ({"kind": "amplitude-damping", "p": 0.4}, 2),
        ({"kind": "unitary", "phases": [0.0, 1.0, 2.0]}, 3),
        ({"kind": "unitary", "unitary": [[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]]}, 2),
        ({"kind": "transpose", "dim": 2}, 2),
        ({"kind": "symmetrizer", "dim": 3}, 3),
        ({"kind": "conditional_expectation", "blocks": [(2, [0.75, 0.25]), (1, [1.0])]}, 5),
        ({"kind": "conditional_expectation", "blocks": [(1, [1.0])], "transient": 2}, 3),
        ({"kind": "spec_case", "m": 2, "r": [0.75, 0.25], "case": "Half", "l": 2}, 4),
        ({"kind": "spec_case", "m": 2, "r": [0.75, 0.25], "case": "Partition",
          "partition": ([0], [1]), "l": 2, "pad": 1}, 5),
        ({"kind": "random_cptp", "dim": 3, "kraus_count": 2, "seed": 5}, 3),
        ({"kind": "structured_cptp", "factors": [(2, 2), (1, 1)], "seed": 5}, 5),
    ])
    def test_dimensions_and_trace(self, policy, params, dim):
        channel = builtin_channel(ZooSpec(**params))
        assert channel.dim == dim
        assert classify(channel, policy).trace_preserving
        assert spectral_radius(channel) <= 1.0 + 1e-8

    @pytest.mark.parametrize("params", [
        {"kind": "depolarizing", "dim": 3},
        {"kind": "amplitude_damping", "dim": 3, "p": 0.1},
        {"kind": "unitary", "unitary": [[(1.0, 0.0), (1.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]]},
        {"kind": "spec_case", "m": 2, "r": [0.25, 0.75], "case": "Half", "l": 2},
        {"kind": "spec_case", "m": 2, "r": [0.75, 0.25], "case": "Half", "l": 1},
        {"kind": "spec_case", "m": 2, "r": [0.75, 0.25], "case": "Partition", "l": 2},
        {"kind": "spec_case", "m": 2, "r": [0.75, 0.25], "case": "Partition", "l": 2,
         "partition": ([0], [0])},
        {"kind": "random_cptp", "dim": 2},
    ])
    def test_invalid_parameters(self, params):
        with pytest.raises(InputError):
            builtin_channel(ZooSpec(**params))

    @pytest.mark.parametrize("params", [
        {"kind": "teleporter"},
        {"kind": "depolarizing", "dim": 2, "p": 1.5},
        {"kind": "conditional_expectation", "blocks": [(1, [0.5, 0.6])]},
    ])
    def test_spec_validation(self, params):
        with pytest.raises(ValueError):
            ZooSpec(**params)


class TestProjectors:
    """Test cases for the planted projectors."""

    @pytest.mark.parametrize("m, r, case, partition", [
        (2, [0.75, 0.25], CASE_HALF, None),
        (2, [0.75, 0.25], CASE_PARTITION, ([0], [1])),
        (3, [0.5, 0.3, 0.2], CASE_PARTITION, ([0, 2], [1])),
    ])
    def test_spec_case_is_positive_but_not_cp(self, policy, m, r, case, partition):
        phi = spec_case_projector(m, r, case, 2, partition)
        assert idempotence_residual(phi) < 1e-12
        flags = classify(phi, policy)
        assert flags.trace_preserving
        assert flags.hermiticity_preserving
        assert not flags.completely_positive
        assert positivity_falsifier(phi, 10_000, 0, policy) is None

    def test_full_partition_is_conditional_expectation(self):
        r = [0.75, 0.25]
        phi = spec_case_projector(2, r, CASE_PARTITION, 2, ([0, 1], []))
        assert np.allclose(phi.natural, conditional_expectation_projector([(2, r)]).natural)

    def test_symmetrizer_on_three_levels(self, policy):
        phi = transpose_symmetrizer(3)
        assert idempotence_residual(phi) < 1e-12
        flags = classify(phi, policy)
        assert flags.trace_preserving
        assert not flags.completely_positive
        assert positivity_falsifier(phi, 10_000, 0, policy) is None
        assert fixed_space_basis(phi, policy).dim == 6

    def test_spec_case_block_action(self):
        phi = spec_case_projector(2, [0.75, 0.25], CASE_HALF, 2)
        assert np.allclose(apply(phi, np.diag([0.0, 1.0, 0.0, 0.0])), np.diag([0.75, 0.25, 0.0, 0.0]))

    def test_conditional_expectation_is_cptp_projector(self, policy):
        phi = conditional_expectation_projector([(2, [0.75, 0.25]), (1, [1.0])])
        assert idempotence_residual(phi) < 1e-12
        assert classify(phi, policy).completely_positive

    def test_transient_drains_into_first_block(self):
        phi = conditional_expectation_projector([(1, [0.75, 0.25])], transient=1)
        assert np.allclose(apply(phi, np.diag([0.0, 0.0, 1.0])), np.diag([0.75, 0.25, 0.0]))


class TestRandomGenerators:
    """Test cases for seeded random channels."""

    def test_random_cptp_is_deterministic(self):
        assert np.array_equal(random_cptp(3, 2, 42).natural, random_cptp(3, 2, 42).natural)
        assert not np.allclose(random_cptp(3, 2, 42).natural, random_cptp(3, 2, 43).natural)

    def test_random_cptp_is_cptp(self, policy):
        flags = classify(random_cptp(3, 3, 1), policy)
        assert flags.trace_preserving and flags.completely_positive

    @pytest.mark.parametrize("rotate", [False, True])
    def test_structured_fixed_dimension(self, policy, rotate):
        channel = structured_cptp([(2, 2), (1, 1)], 3, 9, rotate=rotate)
        assert fixed_space_basis(channel, policy).dim == 5


class TestCorpus:
    """Test cases for the named corpus."""

    def test_entries_are_ptp(self, policy):
        entries = corpus(seed=0, random_count=2)
        names = [name for name, _ in entries]
        assert len(names) == len(set(names))
        for name, channel in entries:
            flags = classify(channel, policy)
            assert flags.trace_preserving, name
            assert spectral_radius(channel) <= 1.0 + 1e-8, name
