"""Seeded chunk dispatcher: runs Monte-Carlo chunks sequentially or on a thread pool."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Generic, Sequence, TypeVar

import numpy as np

logger = logging.getLogger("relaxpolar.dispatcher")

T = TypeVar("T")


@dataclass(frozen=True, slots=True)
class Chunk:
    """A unit of work: `frames` trials of sweep point `point`."""

    point: int
    index: int
    frames: int


def chunk_rng(seed: int, point: int, chunk: int) -> np.random.Generator:
    """Counter-based stream for one (point, chunk); independent of which worker runs it."""
    sequence = np.random.SeedSequence(seed, spawn_key=(point, chunk))
    return np.random.Generator(np.random.Philox(sequence))


def plan_chunks(trials: int, chunk_size: int, point: int = 0) -> list[Chunk]:
    """Split `trials` into chunks of at most `chunk_size` frames."""
    if trials < 1:
        return []
    size = max(1, chunk_size)
    chunks = []
    for index, start in enumerate(range(0, trials, size)):
        chunks.append(Chunk(point=point, index=index, frames=min(size, trials - start)))
    return chunks


class ChunkDispatcher(Generic[T]):
    """Runs chunks and returns their results in chunk order.

    Chunks are submitted in waves of `max_workers`.  When `stop` is given it
    is called with the results collected so far after each chunk, in chunk
    order; the first chunk that makes it true is the last one kept, so the
    outcome does not depend on the number of workers.
    """

    def __init__(self, seed: int, max_workers: int = 1) -> None:
        self._seed = seed
        self._max_workers = max_workers

    def run(
        self,
        chunks: Sequence[Chunk],
        work: Callable[[Chunk, np.random.Generator], T],
        stop: Callable[[list[T]], bool] | None = None,
    ) -> list[T]:
        if not chunks:
            return []

        if self._max_workers <= 1:
            return self._run_sequential(chunks, work, stop)
        else:
            return self._run_concurrent(chunks, work, stop)

    def _rng(self, chunk: Chunk) -> np.random.Generator:
        return chunk_rng(self._seed, chunk.point, chunk.index)

    def _run_sequential(
        self,
        chunks: Sequence[Chunk],
        work: Callable[[Chunk, np.random.Generator], T],
        stop: Callable[[list[T]], bool] | None,
    ) -> list[T]:
        results: list[T] = []
        for chunk in chunks:
            logger.debug("Running chunk %d of point %d (%d frames)", chunk.index, chunk.point, chunk.frames)
            results.append(work(chunk, self._rng(chunk)))
            if stop is not None and stop(results):
                logger.info("Early stop at point %d after chunk %d", chunk.point, chunk.index)
                break
        return results

    def _run_concurrent(
        self,
        chunks: Sequence[Chunk],
        work: Callable[[Chunk, np.random.Generator], T],
        stop: Callable[[list[T]], bool] | None,
    ) -> list[T]:
        results: list[T] = []
        with ThreadPoolExecutor(max_workers=self._max_workers) as pool:
            for start in range(0, len(chunks), self._max_workers):
                wave = chunks[start : start + self._max_workers]
                futures = []
                for chunk in wave:
                    logger.debug("Submitting chunk %d of point %d to pool", chunk.index, chunk.point)
                    futures.append(pool.submit(work, chunk, self._rng(chunk)))
                for chunk, fut in zip(wave, futures):
                    results.append(fut.result())
                    if stop is not None and stop(results):
                        logger.info("Early stop at point %d after chunk %d", chunk.point, chunk.index)
                        for pending in futures:
                            pending.cancel()
                        return results
        return results
