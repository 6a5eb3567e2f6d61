"""Successive-cancellation decoding of relaxed polar codes.

All decoders share one depth-first traversal of the code tree in u-order.
Rows of the working arrays are independent frames (or frames x list
paths), so a whole Monte-Carlo chunk is decoded in one pass.  LLRs are
log(W(y|0)/W(y|1)); an erasure is exactly 0.

At a non-relaxed node with input halves (a, b):
    left child  <- a [+] b                (box-plus)
    right child <- b + (1 - 2 u_left) a
    partial sums (u_left XOR u_right, u_right)
At a relaxed node the halves pass through unchanged and the partial sums
are concatenated, mirroring the encoder.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from relaxpolar.codec.crc import crc_check_batch
from relaxpolar.codec.encoder import bit_reversal_permutation, butterfly
from relaxpolar.exceptions import CodecError
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.polarization.maps import subtree_rate_labels

logger = logging.getLogger("relaxpolar.decoders")

__all__ = [
    "DecodeBatch",
    "DecodeResult",
    "GenieStats",
    "SuccessiveCancellationDecoder",
    "as_llr_block",
    "boxplus",
    "genie_decode",
    "rscd_decode",
    "rscl_decode",
    "sscd_decode",
]

_TINY = np.finfo(np.float64).tiny


def boxplus(a: NDArray[np.float64], b: NDArray[np.float64], *, min_sum: bool = False) -> NDArray[np.float64]:
    """ln((1 + e^(a+b)) / (e^a + e^b)), exact or min-sum."""
    sign = np.sign(a) * np.sign(b)
    x = np.abs(a)
    y = np.abs(b)
    smaller = np.minimum(x, y)
    if min_sum:
        return sign * smaller
    with np.errstate(invalid="ignore", over="ignore"):
        gap = np.abs(x - y)
        gap = np.where(np.isnan(gap), np.inf, gap)
        magnitude = smaller + np.log1p(np.exp(-(x + y))) - np.log1p(np.exp(-gap))
    return sign * np.maximum(magnitude, _TINY)


def _combine(a: NDArray[np.float64], b: NDArray[np.float64], u: NDArray[np.uint8]) -> NDArray[np.float64]:
    with np.errstate(invalid="ignore"):
        out = b + (1.0 - 2.0 * u) * a
    # Conflicting infinities carry no information.
    return np.where(np.isnan(out), 0.0, out)


def as_llr_block(values: Any, length: int) -> NDArray[np.float64]:
    """Validate an LLR vector (or a batch of them) of the given length."""
    llr = np.asarray(values, dtype=np.float64)
    if llr.shape[-1] != length:
        raise CodecError(f"expected {length} LLRs, got {llr.shape[-1]}")
    if np.isnan(llr).any():
        raise CodecError("LLR block contains NaN")
    return llr


@dataclass(frozen=True, slots=True, eq=False)
class DecodeResult:
    """One decoded frame; info_bits are in Γ order and include any CRC bits."""

    u_hat: NDArray[np.uint8]
    info_bits: NDArray[np.uint8]
    crc_ok: bool | None = None
    list_rank: int | None = None
    ops: int = 0
    crc_width: int = 0

    @property
    def payload(self) -> NDArray[np.uint8]:
        return self.info_bits[: self.info_bits.size - self.crc_width]


@dataclass(frozen=True, slots=True, eq=False)
class DecodeBatch:
    u_hat: NDArray[np.uint8]
    info_bits: NDArray[np.uint8]
    ops: int
    crc_ok: NDArray[np.bool_] | None = None
    list_rank: NDArray[np.int64] | None = None
    crc_width: int = 0

    @property
    def frames(self) -> int:
        return int(self.u_hat.shape[0])

    @property
    def payload(self) -> NDArray[np.uint8]:
        return self.info_bits[:, : self.info_bits.shape[1] - self.crc_width]

    def result(self, row: int = 0) -> DecodeResult:
        return DecodeResult(
            u_hat=self.u_hat[row],
            info_bits=self.info_bits[row],
            crc_ok=None if self.crc_ok is None else bool(self.crc_ok[row]),
            list_rank=None if self.list_rank is None else int(self.list_rank[row]),
            ops=self.ops,
            crc_width=self.crc_width,
        )


@dataclass(slots=True)
class GenieStats:
    """Genie-aided counts over all-zero transmissions.

    bit_errors[i] counts wrong decisions at leaf i; node_errors/node_z hold,
    per level and node, the summed error indicator (ties count 1/2) and the
    summed exp(-L/2) over every LLR seen at that node.
    """

    n: int
    frames: int = 0
    bit_errors: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    node_errors: list[NDArray[np.float64]] = field(default_factory=list)
    node_z: list[NDArray[np.float64]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.bit_errors.size == 0:
            self.bit_errors = np.zeros(2**self.n)
        if not self.node_errors:
            self.node_errors = [np.zeros(2**t) for t in range(self.n + 1)]
        if not self.node_z:
            self.node_z = [np.zeros(2**t) for t in range(self.n + 1)]

    def merge(self, other: GenieStats) -> None:
        self.frames += other.frames
        self.bit_errors += other.bit_errors
        for t in range(self.n + 1):
            self.node_errors[t] += other.node_errors[t]
            self.node_z[t] += other.node_z[t]

    def samples(self, t: int) -> int:
        """LLR samples behind each node at level t."""
        return self.frames * 2 ** (self.n - t)


@dataclass(slots=True)
class _Pass:
    alpha: list[NDArray[np.float64]]
    beta: list[NDArray[np.uint8]]
    u_hat: NDArray[np.uint8]
    rng: np.random.Generator | None = None
    genie: GenieStats | None = None
    list_size: int = 1
    metrics: NDArray[np.float64] | None = None
    ops: int = 0

    def permute(self, perm: NDArray[np.int64]) -> None:
        for arr in self.alpha:
            arr[:] = arr[perm]
        for arr in self.beta:
            arr[:] = arr[perm]
        self.u_hat[:] = self.u_hat[perm]


class SuccessiveCancellationDecoder:
    """Relaxation-aware SC decoding with optional SSCD shortcuts.

    With `shortcuts=True`, rate-0 subtrees are skipped and rate-1 subtrees
    are hard-decided at their root and re-encoded; a rate-1 node whose
    input holds an erasure is traversed normally so the output matches
    plain relaxed SC bit for bit.
    """

    def __init__(self, code: CodeSpec, *, min_sum: bool = False, shortcuts: bool = False) -> None:
        self.code = code
        self.n = code.n
        self.length = code.length
        self.min_sum = min_sum
        self.shortcuts = shortcuts
        self._relaxed = [code.relaxation.levels[d] for d in range(self.n)]
        self._info = code.info_mask
        self._perm = bit_reversal_permutation(self.n)
        if shortcuts:
            self._rate_one = subtree_rate_labels(self._info, rate_one=True).levels
            self._rate_zero = subtree_rate_labels(self._info, rate_one=False, rate_zero=True).levels
        else:
            self._rate_one = self._rate_zero = None

    # -- public entry points -------------------------------------------------

    def decode_batch(self, llrs: Any, *, rng: np.random.Generator | None = None) -> DecodeBatch:
        """Decode every row of `llrs` (channel order). Ties at information bits use `rng` if given, else 0."""
        llr = np.atleast_2d(as_llr_block(llrs, self.length))
        state = self._start(llr, rows=llr.shape[0], rng=rng)
        self._descend(state, 0, 0)
        info = state.u_hat[:, self.code.info_positions]
        return DecodeBatch(
            u_hat=state.u_hat,
            info_bits=info,
            ops=state.ops,
            crc_width=self.code.crc.width if self.code.crc else 0,
        )

    def decode_list(self, llrs: Any, list_size: int) -> DecodeBatch:
        """SC-list decoding with penalty path metrics; CRC-aided when the code has a CRC."""
        if list_size < 1:
            raise CodecError(f"list size must be >= 1, got {list_size}")
        if self.shortcuts:
            raise CodecError("list decoding does not use SSCD shortcuts")
        llr = np.atleast_2d(as_llr_block(llrs, self.length))
        frames = llr.shape[0]
        state = self._start(np.repeat(llr, list_size, axis=0), rows=frames * list_size)
        state.list_size = list_size
        state.metrics = np.full((frames, list_size), np.inf)
        state.metrics[:, 0] = 0.0
        self._descend(state, 0, 0)
        return self._select_paths(state, frames)

    def decode_genie(self, llrs: Any, rng: np.random.Generator | None = None) -> GenieStats:
        """Genie-aided pass over all-zero transmissions: every leaf is decided, counted, then forced to 0."""
        llr = np.atleast_2d(as_llr_block(llrs, self.length))
        stats = GenieStats(n=self.n, frames=llr.shape[0])
        state = self._start(llr, rows=llr.shape[0], rng=rng)
        state.genie = stats
        self._descend(state, 0, 0)
        return stats

    # -- traversal -------------------------------------------------------------

    def _start(self, llr: NDArray[np.float64], rows: int, rng: np.random.Generator | None = None) -> _Pass:
        alpha = [np.empty((rows, 2 ** (self.n - d))) for d in range(self.n + 1)]
        beta = [np.zeros((rows, 2 ** (self.n - d)), dtype=np.uint8) for d in range(self.n + 1)]
        alpha[0][:] = llr[:, self._perm]
        return _Pass(alpha=alpha, beta=beta, u_hat=np.zeros((rows, self.length), dtype=np.uint8), rng=rng)

    def _descend(self, state: _Pass, d: int, j: int) -> None:
        if state.genie is not None:
            self._record(state, d, j)
        if d == self.n:
            self._decide(state, j)
            return
        size = 2 ** (self.n - d)
        half = size // 2
        if self.shortcuts and self._shortcut(state, d, j, size):
            return

        relaxed = bool(self._relaxed[d][j])
        node = state.alpha[d]
        if relaxed:
            state.alpha[d + 1][:] = node[:, :half]
        else:
            state.alpha[d + 1][:] = boxplus(node[:, :half], node[:, half:], min_sum=self.min_sum)
            state.ops += half
        self._descend(state, d + 1, 2 * j)
        state.beta[d][:, :half] = state.beta[d + 1]

        node = state.alpha[d]
        if relaxed:
            state.alpha[d + 1][:] = node[:, half:]
        else:
            state.alpha[d + 1][:] = _combine(node[:, :half], node[:, half:], state.beta[d][:, :half])
            state.ops += half
        self._descend(state, d + 1, 2 * j + 1)
        state.beta[d][:, half:] = state.beta[d + 1]
        if not relaxed:
            state.beta[d][:, :half] ^= state.beta[d][:, half:]

    def _shortcut(self, state: _Pass, d: int, j: int, size: int) -> bool:
        leaves = slice(j * size, (j + 1) * size)
        if self._rate_zero[d][j]:
            state.beta[d][:] = 0
            state.u_hat[:, leaves] = 0
            return True
        if self._rate_one[d][j] and not np.any(state.alpha[d] == 0.0):
            hard = (state.alpha[d] < 0.0).astype(np.uint8)
            state.beta[d][:] = hard
            state.u_hat[:, leaves] = butterfly(hard, self.code.relaxation.subtree(d, j)[:-1])
            return True
        return False

    def _decide(self, state: _Pass, j: int) -> None:
        llr = state.alpha[self.n][:, 0]
        if state.list_size > 1 or state.metrics is not None:
            bits = self._decide_list(state, j, llr)
        elif state.genie is not None:
            wrong = (llr < 0.0).astype(np.float64)
            ties = llr == 0.0
            if ties.any():
                if state.rng is not None:
                    wrong = np.where(ties, (state.rng.random(llr.size) < 0.5).astype(np.float64), wrong)
                else:
                    wrong = np.where(ties, 0.5, wrong)
            state.genie.bit_errors[j] += wrong.sum()
            bits = np.zeros(llr.size, dtype=np.uint8)
        elif not self._info[j]:
            bits = np.zeros(llr.size, dtype=np.uint8)
        else:
            hard = llr < 0.0
            ties = llr == 0.0
            if state.rng is not None and ties.any():
                hard = np.where(ties, state.rng.random(llr.size) < 0.5, hard)
            bits = hard.astype(np.uint8)
        state.u_hat[:, j] = bits
        state.beta[self.n][:, 0] = bits

    def _decide_list(self, state: _Pass, j: int, llr: NDArray[np.float64]) -> NDArray[np.uint8]:
        width = state.list_size
        frames = llr.size // width
        llr = llr.reshape(frames, width)
        pen0 = np.where(llr < 0.0, -llr, 0.0)
        if not self._info[j]:
            state.metrics = state.metrics + pen0
            return np.zeros(frames * width, dtype=np.uint8)
        pen1 = np.where(llr > 0.0, llr, 0.0)
        candidates = np.concatenate([state.metrics + pen0, state.metrics + pen1], axis=1)
        penalties = np.concatenate([pen0, pen1], axis=1)
        order = np.lexsort((penalties, candidates), axis=-1)[:, :width]
        parents = order % width
        bits = (order // width).astype(np.uint8)
        state.metrics = np.take_along_axis(candidates, order, axis=1)
        perm = (np.arange(frames)[:, None] * width + parents).ravel()
        if not np.array_equal(perm, np.arange(perm.size)):
            state.permute(perm)
        return bits.ravel()

    def _record(self, state: _Pass, d: int, j: int) -> None:
        values = state.alpha[d]
        stats = state.genie
        stats.node_errors[d][j] += np.count_nonzero(values < 0.0) + 0.5 * np.count_nonzero(values == 0.0)
        with np.errstate(over="ignore"):
            stats.node_z[d][j] += float(np.minimum(np.exp(-values / 2.0), 1e300).sum())

    def _select_paths(self, state: _Pass, frames: int) -> DecodeBatch:
        width = state.list_size
        u_hat = state.u_hat.reshape(frames, width, self.length)
        info = u_hat[:, :, self.code.info_positions]
        order = np.argsort(state.metrics, axis=1, kind="stable")
        chosen = order[:, 0].copy()
        ranks = np.ones(frames, dtype=np.int64)
        crc_ok = None
        crc = self.code.crc
        if crc is not None:
            passes = crc_check_batch(info.reshape(frames * width, -1), crc).reshape(frames, width)
            alive = passes & np.isfinite(state.metrics)
            ranked = np.take_along_axis(alive, order, axis=1)
            found = ranked.any(axis=1)
            first = np.argmax(ranked, axis=1)
            chosen = np.where(found, order[np.arange(frames), first], chosen)
            ranks = np.where(found, first + 1, 1)
            crc_ok = found
        rows = np.arange(frames)
        return DecodeBatch(
            u_hat=u_hat[rows, chosen],
            info_bits=info[rows, chosen],
            ops=state.ops,
            crc_ok=crc_ok,
            list_rank=ranks,
            crc_width=crc.width if crc else 0,
        )


def rscd_decode(
    llr: Any,
    code: CodeSpec,
    *,
    rng: np.random.Generator | None = None,
    min_sum: bool = False,
) -> DecodeResult:
    """Relaxed SC decoding of one LLR block."""
    block = as_llr_block(llr, code.length)
    return SuccessiveCancellationDecoder(code, min_sum=min_sum).decode_batch(block[None, :], rng=rng).result()


def sscd_decode(
    llr: Any,
    code: CodeSpec,
    *,
    rng: np.random.Generator | None = None,
    min_sum: bool = False,
) -> DecodeResult:
    """Relaxed SC decoding with rate-0 / rate-1 shortcuts."""
    block = as_llr_block(llr, code.length)
    decoder = SuccessiveCancellationDecoder(code, min_sum=min_sum, shortcuts=True)
    return decoder.decode_batch(block[None, :], rng=rng).result()


def rscl_decode(llr: Any, code: CodeSpec, list_size: int, *, min_sum: bool = False) -> DecodeResult:
    """Relaxed SC-list decoding of one LLR block."""
    block = as_llr_block(llr, code.length)
    return SuccessiveCancellationDecoder(code, min_sum=min_sum).decode_list(block[None, :], list_size).result()


def genie_decode(llrs: Any, code: CodeSpec, rng: np.random.Generator | None = None) -> GenieStats:
    """Genie-aided statistics for a batch of all-zero transmissions."""
    return SuccessiveCancellationDecoder(code).decode_genie(llrs, rng=rng)
