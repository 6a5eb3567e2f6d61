"""Pydantic config models for the relaxpolar.toml schema."""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from relaxpolar.channels import AwgnChannel, BecChannel, Channel
from relaxpolar.exceptions import ConfigurationError
from relaxpolar.polarization.codespec import CrcConfig
from relaxpolar.polarization.construct import DesignTarget, Scenario

ScenarioName = Literal["fp", "gc", "bc", "ac", "gc-mrp", "ac-mrp"]


class RunConfig(BaseModel):
    """Top-level [run] section."""

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    max_workers: int = Field(default=1, ge=1)
    out: str = "results"


class ChannelConfig(BaseModel):
    """The [channel] section: a BEC by erasure probability or AWGN by SNR or capacity."""

    kind: Literal["bec", "awgn"] = "bec"
    p: float | None = Field(default=None, ge=0.0, le=1.0)
    snr_db: float | None = None
    capacity: float | None = Field(default=None, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _validate_parameters(self) -> ChannelConfig:
        given = [name for name in ("p", "snr_db", "capacity") if getattr(self, name) is not None]
        if self.kind == "bec":
            if not given:
                self.p = 0.5
            elif given != ["p"]:
                raise ValueError(f"a bec channel takes only p, got {given}")
        else:
            if len(given) != 1 or given[0] == "p":
                raise ValueError(f"an awgn channel takes exactly one of snr_db or capacity, got {given}")
        return self

    def build(self) -> Channel:
        if self.kind == "bec":
            return BecChannel(p=float(self.p))
        if self.snr_db is not None:
            return AwgnChannel.from_snr_db(self.snr_db)
        return AwgnChannel.from_capacity(float(self.capacity))

    @property
    def sweep_value(self) -> float:
        """p for the BEC, SNR in dB for AWGN."""
        if self.kind == "bec":
            return float(self.p)
        if self.snr_db is not None:
            return self.snr_db
        return self.build().snr_db

    def at(self, value: float) -> ChannelConfig:
        """The same channel family at another sweep value."""
        if self.kind == "bec":
            return ChannelConfig(kind="bec", p=value)
        return ChannelConfig(kind="awgn", snr_db=value)


class CodeConfig(BaseModel):
    """The [code] section. Exactly one of rate or fer_target; rate 0.5 when neither is given."""

    n: int = Field(default=10, ge=1, le=24)
    rate: float | None = Field(default=None, gt=0.0, le=1.0)
    fer_target: float | None = Field(default=None, gt=0.0, lt=1.0)
    scenario: ScenarioName = "fp"
    reliability: Literal["auto", "exact", "ga", "mc"] = "auto"
    reliability_trials: int = Field(default=10_000, ge=1)
    crc: bool = False
    crc_width: int = Field(default=16, ge=1, le=64)
    crc_polynomial: int = Field(default=0x1021, ge=1)
    crc_init: int = Field(default=0xFFFF, ge=0)

    @model_validator(mode="after")
    def _validate_target(self) -> CodeConfig:
        if self.rate is not None and self.fer_target is not None:
            raise ValueError("give exactly one of rate or fer_target")
        if self.rate is None and self.fer_target is None:
            self.rate = 0.5
        return self

    def target(self) -> DesignTarget:
        return DesignTarget(rate=self.rate, fer=self.fer_target)

    def crc_config(self) -> CrcConfig | None:
        if not self.crc:
            return None
        try:
            return CrcConfig(width=self.crc_width, polynomial=self.crc_polynomial, init=self.crc_init)
        except ValueError as exc:
            raise ConfigurationError(f"Invalid CRC settings: {exc}") from exc

    @property
    def scenario_enum(self) -> Scenario:
        return Scenario(self.scenario)


class DecoderConfig(BaseModel):
    """The [decoder] section."""

    kind: Literal["sc", "list", "sscd"] = "sc"
    list_size: int = Field(default=8, ge=1)
    min_sum: bool = False


class SimSection(BaseModel):
    """The [sim] section. `points` are p values (BEC) or SNRs in dB (AWGN)."""

    trials: int = Field(default=1000, ge=1)
    seed: int | None = Field(default=None, ge=0)
    early_stop_errors: int | None = Field(default=100, ge=1)
    chunk_size: int = Field(default=256, ge=1)
    points: list[float] = Field(default_factory=list)


class BoundsConfig(BaseModel):
    """The [bounds] section."""

    p_grid: list[float] = Field(default_factory=lambda: [round(0.1 * k, 1) for k in range(1, 10)])
    n: int = Field(default=12, ge=1, le=22)
    fer_target: float = Field(default=1e-5, gt=0.0, lt=1.0)
    beta: float = Field(default=0.3, gt=0.0, lt=0.5)
    delta: float = Field(default=0.1, gt=0.0)
    epsilon: float = Field(default=0.01, gt=0.0)

    @model_validator(mode="after")
    def _validate_grid(self) -> BoundsConfig:
        for p in self.p_grid:
            if not 0.0 < p < 1.0:
                raise ValueError(f"p_grid values must lie in (0, 1), got {p!r}")
        if not self.delta < 1.0 / self.beta - 2.0:
            raise ValueError(f"delta must be below 1/beta - 2 = {1.0 / self.beta - 2.0:.6g}")
        return self


class SimConfig(BaseModel):
    """Root config object representing the entire relaxpolar.toml."""

    version: int = 1
    run: RunConfig = Field(default_factory=RunConfig)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    code: CodeConfig = Field(default_factory=CodeConfig)
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    sim: SimSection = Field(default_factory=SimSection)
    bounds: BoundsConfig = Field(default_factory=BoundsConfig)

    @model_validator(mode="after")
    def _validate_combinations(self) -> SimConfig:
        if self.code.reliability == "exact" and self.channel.kind != "bec":
            raise ValueError("exact reliability trees exist only for the bec channel")
        if self.code.reliability == "ga" and self.channel.kind != "awgn":
            raise ValueError("Gaussian approximation applies only to the awgn channel")
        if self.code.reliability == "mc" and self.sim.seed is None:
            raise ValueError("Monte-Carlo reliability estimation needs sim.seed")
        return self

    def require_seed(self, what: str) -> int:
        if self.sim.seed is None:
            raise ConfigurationError(f"{what} is stochastic and needs a seed (sim.seed or --seed)")
        return self.sim.seed

    def resolve_out(self, config_dir: Path) -> Path:
        """Output directory, relative paths taken from the config file's directory."""
        return (config_dir / self.run.out).resolve()
