"""Tests for config model validation."""

from __future__ import annotations

from pathlib import Path

import pytest
from pydantic import ValidationError

from relaxpolar.channels import AwgnChannel, BecChannel
from relaxpolar.exceptions import ConfigurationError
from relaxpolar.polarization.construct import Scenario
from relaxpolar.sim.config_models import (
    BoundsConfig,
    ChannelConfig,
    CodeConfig,
    DecoderConfig,
    RunConfig,
    SimConfig,
    SimSection,
)


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.log_level == "INFO"
        assert cfg.max_workers == 1
        assert cfg.out == "results"

    def test_invalid_log_level_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig(log_level="TRACE")

    def test_zero_max_workers_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig(max_workers=0)


class TestChannelConfig:
    def test_bec_defaults_to_half(self):
        cfg = ChannelConfig()
        assert cfg.p == 0.5
        assert isinstance(cfg.build(), BecChannel)

    def test_bec_rejects_snr(self):
        with pytest.raises(ValidationError, match="only p"):
            ChannelConfig(kind="bec", snr_db=2.0)

    def test_awgn_needs_exactly_one_parameter(self):
        with pytest.raises(ValidationError, match="exactly one"):
            ChannelConfig(kind="awgn")
        with pytest.raises(ValidationError, match="exactly one"):
            ChannelConfig(kind="awgn", snr_db=1.0, capacity=0.5)

    def test_awgn_from_snr(self):
        cfg = ChannelConfig(kind="awgn", snr_db=2.0)
        channel = cfg.build()
        assert isinstance(channel, AwgnChannel)
        assert channel.snr_db == pytest.approx(2.0)
        assert cfg.sweep_value == 2.0

    def test_at_moves_the_sweep_point(self):
        assert ChannelConfig(kind="bec", p=0.3).at(0.6).p == 0.6
        assert ChannelConfig(kind="awgn", capacity=0.5).at(1.5).snr_db == 1.5

    def test_p_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            ChannelConfig(p=1.5)


class TestCodeConfig:
    def test_rate_defaults_when_no_target(self):
        cfg = CodeConfig()
        assert cfg.rate == 0.5
        assert cfg.target().rate == 0.5

    def test_both_targets_rejected(self):
        with pytest.raises(ValidationError, match="exactly one"):
            CodeConfig(rate=0.5, fer_target=1e-3)

    def test_fer_target(self):
        cfg = CodeConfig(fer_target=1e-4)
        assert cfg.rate is None
        assert cfg.target().fer == 1e-4

    def test_scenario_enum(self):
        assert CodeConfig(scenario="ac-mrp").scenario_enum is Scenario.AC_MRP

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValidationError):
            CodeConfig(scenario="xx")

    def test_crc_config(self):
        assert CodeConfig().crc_config() is None
        crc = CodeConfig(crc=True).crc_config()
        assert crc.width == 16
        assert crc.polynomial == 0x1021

    def test_crc_polynomial_too_wide(self):
        with pytest.raises(ConfigurationError, match="Invalid CRC"):
            CodeConfig(crc=True, crc_width=8, crc_polynomial=0x1FF, crc_init=0).crc_config()


class TestDecoderAndSim:
    def test_decoder_defaults(self):
        cfg = DecoderConfig()
        assert cfg.kind == "sc"
        assert cfg.list_size == 8

    def test_list_size_positive(self):
        with pytest.raises(ValidationError):
            DecoderConfig(list_size=0)

    def test_sim_defaults(self):
        cfg = SimSection()
        assert cfg.seed is None
        assert cfg.early_stop_errors == 100
        assert cfg.points == []


class TestBoundsConfig:
    def test_default_grid(self):
        assert BoundsConfig().p_grid == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]

    def test_grid_outside_unit_interval(self):
        with pytest.raises(ValidationError, match="p_grid"):
            BoundsConfig(p_grid=[0.0, 0.5])

    def test_delta_domain(self):
        with pytest.raises(ValidationError, match="delta"):
            BoundsConfig(beta=0.4, delta=1.0)


class TestSimConfig:
    def test_defaults(self):
        cfg = SimConfig()
        assert cfg.version == 1
        assert cfg.channel.kind == "bec"
        assert cfg.code.n == 10

    def test_exact_reliability_needs_bec(self):
        with pytest.raises(ValidationError, match="bec"):
            SimConfig(channel={"kind": "awgn", "snr_db": 1.0}, code={"reliability": "exact"})

    def test_ga_needs_awgn(self):
        with pytest.raises(ValidationError, match="awgn"):
            SimConfig(code={"reliability": "ga"})

    def test_mc_needs_seed(self):
        with pytest.raises(ValidationError, match="seed"):
            SimConfig(code={"reliability": "mc"})
        assert SimConfig(code={"reliability": "mc"}, sim={"seed": 3}).sim.seed == 3

    def test_require_seed(self):
        with pytest.raises(ConfigurationError, match="needs a seed"):
            SimConfig().require_seed("an FER campaign")
        assert SimConfig(sim={"seed": 5}).require_seed("x") == 5

    def test_resolve_out(self, tmp_path: Path):
        cfg = SimConfig(run={"out": "runs"})
        assert cfg.resolve_out(tmp_path) == (tmp_path / "runs").resolve()
