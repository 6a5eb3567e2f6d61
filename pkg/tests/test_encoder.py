"""Tests for the relaxed polar encoder."""

from __future__ import annotations

import numpy as np
import pytest

from relaxpolar.codec.encoder import bit_reversal_permutation, encode, generator_matrix, kron_generator
from relaxpolar.exceptions import CodecError
from relaxpolar.polarization.maps import RelaxationMap, random_relaxation_map


class TestBitReversal:
    def test_n3(self):
        assert bit_reversal_permutation(3).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]

    def test_involution(self):
        perm = bit_reversal_permutation(6)
        assert np.array_equal(perm[perm], np.arange(64))


class TestEncode:
    def test_first_unit_vector(self):
        x = encode(np.array([1, 0, 0, 0], dtype=np.uint8), RelaxationMap.zeros(2))
        assert x.tolist() == [1, 0, 0, 0]

    def test_last_unit_vector(self):
        x = encode(np.array([0, 0, 0, 1], dtype=np.uint8), RelaxationMap.zeros(2))
        assert x.tolist() == [1, 1, 1, 1]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_kronecker_product(self, n):
        assert np.array_equal(generator_matrix(RelaxationMap.zeros(n)), kron_generator(n))

    def test_fully_relaxed_is_a_permutation(self, rng):
        u = rng.integers(0, 2, size=(5, 16), dtype=np.uint8)
        assert np.array_equal(encode(u, RelaxationMap.full(4)), u[:, bit_reversal_permutation(4)])

    def test_batch_rows_independent(self, rng):
        relaxation = random_relaxation_map(5, rng, density=0.3)
        u = rng.integers(0, 2, size=(6, 32), dtype=np.uint8)
        batch = encode(u, relaxation)
        for row, x in zip(u, batch):
            assert np.array_equal(encode(row, relaxation), x)

    def test_linear(self, rng):
        relaxation = random_relaxation_map(5, rng, density=0.3)
        a = rng.integers(0, 2, size=32, dtype=np.uint8)
        b = rng.integers(0, 2, size=32, dtype=np.uint8)
        assert np.array_equal(encode(a ^ b, relaxation), encode(a, relaxation) ^ encode(b, relaxation))

    def test_relaxation_removes_xors(self):
        relaxed = RelaxationMap((np.zeros(1, bool), np.array([False, True]), np.array([False, False, True, True])))
        assert generator_matrix(relaxed).sum() < generator_matrix(RelaxationMap.zeros(2)).sum()

    def test_input_is_not_modified(self):
        u = np.array([0, 1, 1, 0], dtype=np.uint8)
        encode(u, RelaxationMap.zeros(2))
        assert u.tolist() == [0, 1, 1, 0]

    def test_length_mismatch(self):
        with pytest.raises(CodecError, match="expected 8 bits"):
            encode(np.zeros(4, dtype=np.uint8), RelaxationMap.zeros(3))
