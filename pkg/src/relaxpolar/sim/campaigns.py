"""Construction summaries, bound sweeps and Monte-Carlo FER/BER campaigns."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from relaxpolar.bounds import (
    BoundsReport,
    LatencyMode,
    decoding_cr,
    evaluate_bounds,
    latency_cycles,
    latency_reduction,
    measured_cr,
    rate_loss,
)
from relaxpolar.channels import Channel
from relaxpolar.codec.crc import crc_attach_batch
from relaxpolar.codec.decoders import DecodeBatch, SuccessiveCancellationDecoder
from relaxpolar.codec.encoder import encode
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.polarization.construct import CodeDesign, design_code
from relaxpolar.sim.config_models import DecoderConfig, SimConfig
from relaxpolar.sim.dispatcher import Chunk, ChunkDispatcher, plan_chunks
from relaxpolar.sim.records import TrialRecord, write_bound_rows, write_trial_records

logger = logging.getLogger("relaxpolar.campaigns")

__all__ = [
    "ChunkCount",
    "ConstructionSummary",
    "FrameSimulator",
    "design_from_config",
    "run_bounds",
    "run_construct",
    "run_fer",
    "simulate_point",
    "summarize_design",
]


@dataclass(frozen=True, slots=True)
class ConstructionSummary:
    scenario: str
    channel: str
    n: int
    k: int
    rate: float
    fp_rate: float
    rate_loss: float
    target_met: bool
    thresholds: dict[str, float]
    measured_cr: float
    decoding_cr: dict[str, float]
    latency: dict[str, int]
    latency_reduction: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "channel": self.channel,
            "n": self.n,
            "k": self.k,
            "rate": self.rate,
            "fp_rate": self.fp_rate,
            "rate_loss": self.rate_loss,
            "target_met": self.target_met,
            "thresholds": dict(self.thresholds),
            "measured_cr": self.measured_cr,
            "decoding_cr": dict(self.decoding_cr),
            "latency": dict(self.latency),
            "latency_reduction": dict(self.latency_reduction),
        }


def summarize_design(design: CodeDesign, channel: Channel) -> ConstructionSummary:
    code = design.code
    modes = list(LatencyMode)
    return ConstructionSummary(
        scenario=design.scenario.value,
        channel=channel.label,
        n=code.n,
        k=code.k,
        rate=code.rate,
        fp_rate=design.fp.rate,
        rate_loss=rate_loss(design.fp, code),
        target_met=code.target_met,
        thresholds=design.thresholds.to_dict(),
        measured_cr=measured_cr(code.relaxation),
        decoding_cr={m.value: decoding_cr(code, m) for m in modes},
        latency={m.value: latency_cycles(code, m) for m in modes},
        latency_reduction={m.value: latency_reduction(code, m) for m in modes},
    )


def design_from_config(config: SimConfig, channel: Channel | None = None) -> CodeDesign:
    code_cfg = config.code
    return design_code(
        channel or config.channel.build(),
        code_cfg.n,
        code_cfg.target(),
        code_cfg.scenario_enum,
        crc=code_cfg.crc_config(),
        reliability=code_cfg.reliability,
        trials=code_cfg.reliability_trials,
        seed=config.sim.seed,
        max_workers=config.run.max_workers,
    )


def run_construct(config: SimConfig, out_dir: Path) -> tuple[CodeDesign, ConstructionSummary]:
    """Design the configured code and write its spec, map and summary into `out_dir`."""
    channel = config.channel.build()
    design = design_from_config(config, channel)
    summary = summarize_design(design, channel)
    out_dir.mkdir(parents=True, exist_ok=True)
    label = design.code.label
    design.code.save(out_dir / f"{label}_code.json", out_dir / f"{label}_map.json")
    (out_dir / f"{label}_summary.json").write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8")
    logger.info(
        "Constructed %s code: N=%d, K=%d, CR=%.4f, rate loss %.3g",
        label, design.code.length, design.code.k, summary.measured_cr, summary.rate_loss,
    )
    if not design.code.target_met:
        logger.warning("Design target not met for %s", label)
    return design, summary


def run_bounds(config: SimConfig, out_dir: Path | None = None) -> list[BoundsReport]:
    """Evaluate every bound and measured reduction over the configured p grid."""
    cfg = config.bounds
    reports = []
    for p in cfg.p_grid:
        logger.info("Bounds at p=%g, n=%d", p, cfg.n)
        reports.append(
            evaluate_bounds(p, cfg.n, cfg.fer_target, beta=cfg.beta, delta=cfg.delta, epsilon=cfg.epsilon)
        )
    if out_dir is not None:
        write_bound_rows(out_dir / "bounds.csv", [r.to_row() for r in reports])
    return reports


@dataclass(frozen=True, slots=True)
class ChunkCount:
    frames: int
    frame_errors: int
    bit_errors: int


class FrameSimulator:
    """Random payloads through encoder, channel and decoder for one code."""

    def __init__(self, code: CodeSpec, decoder: DecoderConfig) -> None:
        self.code = code
        self.decoder_config = decoder
        self._decoder = SuccessiveCancellationDecoder(
            code, min_sum=decoder.min_sum, shortcuts=decoder.kind == "sscd"
        )

    @property
    def decoder_label(self) -> str:
        if self.decoder_config.kind == "list":
            return f"list{self.decoder_config.list_size}"
        return self.decoder_config.kind

    def decode(self, llr: np.ndarray) -> DecodeBatch:
        if self.decoder_config.kind == "list":
            return self._decoder.decode_list(llr, self.decoder_config.list_size)
        return self._decoder.decode_batch(llr)

    def run_chunk(self, chunk: Chunk, rng: np.random.Generator, channel: Channel) -> ChunkCount:
        code = self.code
        payload = rng.integers(0, 2, size=(chunk.frames, code.payload_bits), dtype=np.uint8)
        info = crc_attach_batch(payload, code.crc) if code.crc is not None else payload
        u = np.zeros((chunk.frames, code.length), dtype=np.uint8)
        u[:, code.info_positions] = info
        llr = channel.transmit_llr(encode(u, code.relaxation), rng)
        decoded = self.decode(llr)
        wrong = decoded.payload != payload
        return ChunkCount(
            frames=chunk.frames,
            frame_errors=int(np.count_nonzero(wrong.any(axis=1))),
            bit_errors=int(np.count_nonzero(wrong)),
        )


def simulate_point(
    simulator: FrameSimulator,
    channel: Channel,
    point: float,
    *,
    point_index: int,
    trials: int,
    seed: int,
    chunk_size: int,
    max_workers: int = 1,
    early_stop_errors: int | None = None,
) -> TrialRecord:
    """Monte-Carlo FER/BER at one sweep point; stops after the first chunk reaching the error count."""
    chunks = plan_chunks(trials, chunk_size, point=point_index)

    def stop(done: list[ChunkCount]) -> bool:
        return early_stop_errors is not None and sum(c.frame_errors for c in done) >= early_stop_errors

    started = time.perf_counter()
    counts = ChunkDispatcher[ChunkCount](seed, max_workers).run(
        chunks, lambda chunk, rng: simulator.run_chunk(chunk, rng, channel), stop
    )
    frames = sum(c.frames for c in counts)
    record = TrialRecord(
        point=point,
        trials=frames,
        frame_errors=sum(c.frame_errors for c in counts),
        bit_errors=sum(c.bit_errors for c in counts),
        info_bits_total=frames * simulator.code.payload_bits,
        wall_time=time.perf_counter() - started,
        label=simulator.code.label,
        decoder=simulator.decoder_label,
        early_stopped=frames < trials,
    )
    logger.info(
        "Point %g: %d frames, FER=%.4g, BER=%.4g%s",
        point, record.trials, record.fer, record.ber, " (early stop)" if record.early_stopped else "",
    )
    return record


def run_fer(config: SimConfig, out_dir: Path | None = None, code: CodeSpec | None = None) -> list[TrialRecord]:
    """FER/BER sweep of one code over the configured points (p or SNR)."""
    seed = config.require_seed("an FER campaign")
    if code is None:
        code = design_from_config(config).code
    simulator = FrameSimulator(code, config.decoder)
    points = config.sim.points or [config.channel.sweep_value]
    records = []
    for index, value in enumerate(points):
        channel = config.channel.at(value).build()
        records.append(
            simulate_point(
                simulator,
                channel,
                value,
                point_index=index,
                trials=config.sim.trials,
                seed=seed,
                chunk_size=config.sim.chunk_size,
                max_workers=config.run.max_workers,
                early_stop_errors=config.sim.early_stop_errors,
            )
        )
    if out_dir is not None:
        write_trial_records(out_dir / f"fer_{code.label}_{simulator.decoder_label}.csv", records)
    return records
