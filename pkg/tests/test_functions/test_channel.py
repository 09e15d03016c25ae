"""
Tests for super-operator representations and channel predicates.
"""

import numpy as np
import pytest

from functions.channel import (
    apply, build_superop, choi_matrix, classify, compose, conjugate_by_unitary,
    direct_sum_superop, positivity_falsifier, superop_from_function, to_kraus, unit_images
)
from functions.exceptions import InputError
from functions.zoo import amplitude_damping, depolarizing, haar_unitary, transpose_map, transpose_symmetrizer


class TestRepresentations:
    """Test cases for Kraus, Choi and natural conversions."""

    def test_representations_agree(self):
        channel = amplitude_damping(0.4)
        from_choi = build_superop(2, choi=choi_matrix(channel))
        assert np.allclose(from_choi.natural, channel.natural)

    def test_apply_matches_kraus_sum(self, rng):
        channel = amplitude_damping(0.3)
        mu = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        expected = sum(op @ mu @ op.conj().T for op in channel.kraus)
        assert np.allclose(apply(channel, mu), expected)

    def test_unit_images(self):
        channel = transpose_map(3)
        images = unit_images(channel)
        for a in range(3):
            for b in range(3):
                unit = np.zeros((3, 3))
                unit[a, b] = 1.0
                assert np.allclose(images[a, b], apply(channel, unit))

    def test_transpose_choi_is_swap(self):
        choi = choi_matrix(transpose_map(2))
        swap = np.eye(4)[[0, 2, 1, 3]]
        assert np.allclose(choi, swap)

    @pytest.mark.parametrize("kwargs", [
        {},
        {"kraus": [np.eye(2)], "natural": np.eye(4)},
        {"natural": np.eye(3)},
        {"kraus": [np.eye(3)]},
        {"kraus": []},
    ])
    def test_invalid_representation(self, kwargs):
        with pytest.raises(InputError):
            build_superop(2, **kwargs)

    def test_apply_dimension_mismatch(self):
        with pytest.raises(InputError):
            apply(depolarizing(2, 0.5), np.eye(3))


class TestClassify:
    """Test cases for the TP / HP / CP flags."""

    def test_depolarizing_is_cptp(self, policy):
        flags = classify(depolarizing(3, 0.5), policy)
        assert flags.trace_preserving
        assert flags.hermiticity_preserving
        assert flags.completely_positive

    def test_transpose_is_not_cp(self, policy):
        flags = classify(transpose_map(2), policy, samples=500, seed=3)
        assert flags.trace_preserving
        assert flags.hermiticity_preserving
        assert not flags.completely_positive
        assert flags.choi_min_eigenvalue == pytest.approx(-1.0)
        # transpose is positive, so the falsifier cannot find a witness
        assert flags.positivity_witness is None

    def test_non_hermiticity_preserving(self, policy):
        natural = np.eye(4, dtype=complex)
        natural[1, 0] = 0.5
        flags = classify(build_superop(2, natural=natural), policy)
        assert not flags.hermiticity_preserving
        assert not flags.completely_positive

    def test_falsifier_finds_negative_map(self, policy):
        negation = superop_from_function(2, lambda mu: -mu)
        witness = positivity_falsifier(negation, 50, 7, policy)
        assert witness is not None
        assert witness.value == pytest.approx(-1.0)
        image = apply(negation, np.outer(witness.x, witness.x.conj()))
        assert np.real(witness.z.conj() @ image @ witness.z) == pytest.approx(witness.value)

    def test_falsifier_is_deterministic(self, policy):
        negation = superop_from_function(2, lambda mu: -mu)
        first = positivity_falsifier(negation, 20, 11, policy)
        second = positivity_falsifier(negation, 20, 11, policy)
        assert np.array_equal(first.x, second.x)


class TestCombinators:
    """Test cases for direct sums, composition and rotation."""

    def test_direct_sum(self):
        total = direct_sum_superop(depolarizing(2, 1.0), depolarizing(1, 1.0))
        assert total.dim == 3
        assert total.kraus is not None
        assert np.allclose(apply(total, np.eye(3)), np.diag([1.0, 1.0, 1.0]))
        assert np.allclose(apply(total, np.ones((3, 3))), np.diag([1.0, 1.0, 1.0]))

    def test_compose_with_depolarizing(self):
        channel = compose(depolarizing(2, 1.0), amplitude_damping(0.5))
        assert np.allclose(apply(channel, np.diag([0.0, 1.0])), np.eye(2) / 2)

    def test_compose_dimension_mismatch(self):
        with pytest.raises(InputError):
            compose(depolarizing(2, 0.5), depolarizing(3, 0.5))

    def test_conjugate_natural_matches_kraus(self, rng):
        channel = amplitude_damping(0.4)
        unitary = haar_unitary(2, rng)
        rotated = conjugate_by_unitary(channel, unitary)
        by_natural = conjugate_by_unitary(build_superop(2, natural=channel.natural), unitary)
        assert np.allclose(rotated.natural, by_natural.natural)

    def test_to_kraus(self, policy):
        channel = build_superop(3, natural=depolarizing(3, 0.5).natural)
        kraus = to_kraus(channel, policy)
        rebuilt = build_superop(3, kraus=kraus)
        assert np.allclose(rebuilt.natural, channel.natural)
        assert to_kraus(transpose_symmetrizer(2), policy) is None
