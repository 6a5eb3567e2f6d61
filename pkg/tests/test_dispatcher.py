"""Tests for the chunk dispatcher."""

from __future__ import annotations

import numpy as np

from relaxpolar.sim.dispatcher import Chunk, ChunkDispatcher, chunk_rng, plan_chunks


def _draw(chunk: Chunk, rng: np.random.Generator) -> tuple[int, float]:
    return chunk.index, float(rng.random())


class TestPlanChunks:
    def test_even_split(self):
        chunks = plan_chunks(300, 100, point=2)
        assert [c.frames for c in chunks] == [100, 100, 100]
        assert [c.index for c in chunks] == [0, 1, 2]
        assert all(c.point == 2 for c in chunks)

    def test_remainder(self):
        assert [c.frames for c in plan_chunks(250, 100)] == [100, 100, 50]

    def test_no_trials(self):
        assert plan_chunks(0, 10) == []


class TestChunkRng:
    def test_same_key_same_stream(self):
        assert chunk_rng(5, 1, 2).random() == chunk_rng(5, 1, 2).random()

    def test_different_keys_differ(self):
        assert chunk_rng(5, 1, 2).random() != chunk_rng(5, 2, 1).random()
        assert chunk_rng(5, 0, 0).random() != chunk_rng(6, 0, 0).random()


class TestChunkDispatcher:
    def test_sequential_dispatch(self):
        results = ChunkDispatcher[tuple[int, float]](seed=1).run(plan_chunks(40, 10), _draw)
        assert [r[0] for r in results] == [0, 1, 2, 3]

    def test_concurrent_matches_sequential(self):
        chunks = plan_chunks(70, 10)
        sequential = ChunkDispatcher[tuple[int, float]](seed=9, max_workers=1).run(chunks, _draw)
        concurrent = ChunkDispatcher[tuple[int, float]](seed=9, max_workers=3).run(chunks, _draw)
        assert sequential == concurrent

    def test_empty_chunks(self):
        assert ChunkDispatcher[int](seed=0).run([], lambda c, r: 1) == []

    def test_early_stop_is_worker_independent(self):
        chunks = plan_chunks(100, 10)

        def stop(done: list[tuple[int, float]]) -> bool:
            return len(done) >= 4

        sequential = ChunkDispatcher[tuple[int, float]](seed=2).run(chunks, _draw, stop)
        concurrent = ChunkDispatcher[tuple[int, float]](seed=2, max_workers=3).run(chunks, _draw, stop)
        assert len(sequential) == 4
        assert sequential == concurrent
