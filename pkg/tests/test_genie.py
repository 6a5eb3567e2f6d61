"""Tests for Monte-Carlo genie-aided reliability estimation."""

from __future__ import annotations

import numpy as np
import pytest

from relaxpolar.channels import AwgnChannel, BecChannel
from relaxpolar.exceptions import ConstructionError
from relaxpolar.polarization.genie import default_chunk_size, mc_genie_bit_error
from relaxpolar.polarization.trees import ReliabilityKind, bec_z_tree


class TestGenieEstimate:
    def test_matches_exact_bec_tree(self):
        trials = 20_000
        estimate = mc_genie_bit_error(BecChannel(0.4), 3, trials, seed=11)
        exact = bec_z_tree(0.4, 3).z[3] / 2.0
        sigma = np.sqrt(exact * (1.0 - exact) / trials)
        assert np.all(np.abs(estimate.bit_error - exact) <= 5.0 * sigma)
        assert estimate.trials == trials

    def test_deterministic_given_seed(self):
        a = mc_genie_bit_error(AwgnChannel.from_snr_db(1.0), 3, 500, seed=4, chunk_size=100)
        b = mc_genie_bit_error(AwgnChannel.from_snr_db(1.0), 3, 500, seed=4, chunk_size=100, max_workers=3)
        assert np.array_equal(a.bit_error, b.bit_error)

    def test_to_tree(self):
        tree = mc_genie_bit_error(BecChannel(0.5), 2, 4000, seed=1).to_tree()
        assert tree.kind is ReliabilityKind.MC_GENIE
        assert tree.n == 2
        assert tree.e_upper[0][0] == pytest.approx(0.25, abs=0.03)
        assert np.array_equal(tree.key[2], tree.e_upper[2])

    def test_standard_error(self):
        estimate = mc_genie_bit_error(BecChannel(0.5), 2, 100, seed=2)
        assert estimate.standard_error().shape == (4,)

    def test_needs_trials(self):
        with pytest.raises(ConstructionError, match="at least one trial"):
            mc_genie_bit_error(BecChannel(0.5), 2, 0, seed=1)

    def test_default_chunk_size(self):
        assert default_chunk_size(1024) == 1024
        assert default_chunk_size(2**22) == 1
