"""Monte-Carlo bit-channel estimates from genie-aided SC decoding."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from relaxpolar.channels import Channel
from relaxpolar.codec.decoders import GenieStats, SuccessiveCancellationDecoder
from relaxpolar.exceptions import ConstructionError
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.polarization.maps import RelaxationMap
from relaxpolar.polarization.trees import ReliabilityKind, ReliabilityTree
from relaxpolar.sim.dispatcher import Chunk, ChunkDispatcher, plan_chunks

logger = logging.getLogger("relaxpolar.genie")

__all__ = ["GenieEstimate", "default_chunk_size", "mc_genie_bit_error"]

# LLR values per chunk; keeps the working set of one chunk around 32 MB.
_CHUNK_LLRS = 2**20


def default_chunk_size(length: int) -> int:
    return max(1, _CHUNK_LLRS // length)


@dataclass(frozen=True, slots=True, eq=False)
class GenieEstimate:
    """Per-index genie error rates plus the per-node statistics behind them."""

    n: int
    trials: int
    bit_error: NDArray[np.float64]
    stats: GenieStats

    def standard_error(self) -> NDArray[np.float64]:
        return np.sqrt(np.maximum(self.bit_error * (1.0 - self.bit_error), 0.0) / self.trials)

    def to_tree(self) -> ReliabilityTree:
        """Monte-Carlo reliability tree: EP and Z averaged over every LLR seen at a node."""
        errors = []
        zs = []
        for t in range(self.n + 1):
            samples = self.stats.samples(t)
            errors.append(np.clip(self.stats.node_errors[t] / samples, 0.0, 1.0))
            zs.append(np.clip(self.stats.node_z[t] / samples, 0.0, 1.0))
        errors_t = tuple(errors)
        return ReliabilityTree(
            kind=ReliabilityKind.MC_GENIE,
            z=tuple(zs),
            e_lower=errors_t,
            e_upper=errors_t,
            key=errors_t,
        )


def mc_genie_bit_error(
    channel: Channel,
    n: int,
    trials: int,
    seed: int,
    *,
    relaxation: RelaxationMap | None = None,
    chunk_size: int | None = None,
    max_workers: int = 1,
) -> GenieEstimate:
    """Genie-aided SC over `trials` all-zero frames; deterministic given `seed`.

    Erasure ties are broken with fair coins drawn from the chunk's stream.
    """
    if trials < 1:
        raise ConstructionError(f"genie estimation needs at least one trial, got {trials}")
    relaxation = relaxation or RelaxationMap.zeros(n)
    code = CodeSpec(n=n, good_set=(), relaxation=relaxation)
    decoder = SuccessiveCancellationDecoder(code)
    length = code.length
    chunks = plan_chunks(trials, chunk_size or default_chunk_size(length))

    def work(chunk: Chunk, rng: np.random.Generator) -> GenieStats:
        zeros = np.zeros((chunk.frames, length), dtype=np.uint8)
        llr = channel.transmit_llr(zeros, rng)
        return decoder.decode_genie(llr, rng=rng)

    logger.info("Genie estimation: %s, n=%d, %d trials in %d chunks", channel.label, n, trials, len(chunks))
    parts = ChunkDispatcher[GenieStats](seed, max_workers).run(chunks, work)
    total = GenieStats(n=n)
    for part in parts:
        total.merge(part)
    return GenieEstimate(n=n, trials=total.frames, bit_error=total.bit_errors / total.frames, stats=total)
