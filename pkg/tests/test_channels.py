"""Tests for channel models and their figures of merit."""

from __future__ import annotations

import numpy as np
import pytest

from relaxpolar.channels import (
    AwgnChannel,
    BecChannel,
    DiscreteBms,
    awgn_llr,
    bec_as_dmc,
    bhattacharyya,
    binary_entropy,
    biawgn_capacity,
    bsc,
    capacity,
    check_symmetric,
    error_probability,
    random_symmetric_channel,
)
from relaxpolar.exceptions import ChannelError


class TestDiscreteBms:
    def test_bec_figures(self):
        w = bec_as_dmc(0.3)
        assert bhattacharyya(w) == pytest.approx(0.3)
        assert error_probability(w) == pytest.approx(0.15)
        assert capacity(w) == pytest.approx(0.7)

    def test_bsc_figures(self):
        w = bsc(0.1)
        assert bhattacharyya(w) == pytest.approx(2.0 * np.sqrt(0.09))
        assert error_probability(w) == pytest.approx(0.1)
        assert capacity(w) == pytest.approx(1.0 - binary_entropy(0.1))

    def test_columns_must_sum_to_one(self):
        with pytest.raises(ChannelError, match="sum to 1"):
            DiscreteBms(np.array([[0.5, 0.5], [0.4, 0.5]]))

    def test_shape_checked(self):
        with pytest.raises(ChannelError, match="shape"):
            DiscreteBms(np.ones((2, 3)) / 2.0)

    def test_negative_probability_rejected(self):
        with pytest.raises(ChannelError, match="lie in"):
            DiscreteBms(np.array([[1.2, 0.5], [-0.2, 0.5]]))

    def test_llr_table(self):
        table = bec_as_dmc(0.2).llr_table()
        assert table[0] == np.inf
        assert table[1] == 0.0
        assert table[2] == -np.inf

    def test_json_round_trip(self):
        w = bsc(0.2)
        back = DiscreteBms.from_json(w.to_json())
        assert np.array_equal(back.probs, w.probs)

    def test_bad_payload(self):
        with pytest.raises(ChannelError, match="Invalid DiscreteBms payload"):
            DiscreteBms.from_dict({"M": 3, "probs": [[0.5, 0.5], [0.5, 0.5]]})
        with pytest.raises(ChannelError, match="Invalid DiscreteBms JSON"):
            DiscreteBms.from_json("{not json")

    def test_transmit_llr_matches_outputs(self, rng):
        w = bsc(0.25)
        llr = w.transmit_llr(np.zeros((200, 8), dtype=np.uint8), rng)
        assert set(np.unique(llr)) <= set(w.llr_table())
        flips = np.mean(llr < 0.0)
        assert 0.15 < flips < 0.35

    def test_check_symmetric(self, rng):
        assert check_symmetric(random_symmetric_channel(rng, pairs=3))
        assert not check_symmetric(DiscreteBms(np.array([[0.9, 0.2], [0.1, 0.8]])))

    def test_random_channel_outputs(self, rng):
        assert random_symmetric_channel(rng, pairs=2).outputs == 4
        with pytest.raises(ChannelError):
            random_symmetric_channel(rng, pairs=0)


class TestBecChannel:
    def test_figures(self):
        ch = BecChannel(0.4)
        assert ch.bhattacharyya() == 0.4
        assert ch.error_probability() == 0.2
        assert ch.capacity() == pytest.approx(0.6)
        assert ch.label == "bec p=0.4"

    def test_out_of_range(self):
        with pytest.raises(ChannelError, match="erasure probability"):
            BecChannel(1.5)

    def test_erasures_are_zero(self, rng):
        llr = BecChannel(0.5).transmit_llr(np.array([[0, 1] * 500], dtype=np.uint8), rng)
        known = llr[llr != 0.0]
        assert np.all(np.isinf(known))
        assert 0.4 < np.mean(llr == 0.0) < 0.6


class TestAwgnChannel:
    def test_snr_round_trip(self):
        assert AwgnChannel.from_snr_db(3.0).snr_db == pytest.approx(3.0)

    def test_from_capacity(self):
        ch = AwgnChannel.from_capacity(0.5)
        assert ch.capacity() == pytest.approx(0.5, abs=1e-9)

    def test_capacity_is_monotone(self):
        assert biawgn_capacity(0.5) > biawgn_capacity(1.0) > biawgn_capacity(2.0)

    def test_invalid_sigma(self):
        with pytest.raises(ChannelError, match="sigma"):
            AwgnChannel(0.0)
        with pytest.raises(ChannelError, match="capacity target"):
            AwgnChannel.from_capacity(1.0)

    def test_llr_scaling(self):
        assert awgn_llr(0.5, 1.0) == pytest.approx(1.0)
        assert np.allclose(awgn_llr(np.array([1.0, -1.0]), 0.5), [8.0, -8.0])

    def test_transmit_llr_sign(self, rng):
        llr = AwgnChannel.from_snr_db(20.0).transmit_llr(np.array([[0, 1, 0, 1]], dtype=np.uint8), rng)
        assert np.array_equal(llr < 0.0, np.array([[False, True, False, True]]))
