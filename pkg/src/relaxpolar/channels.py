"""Binary-input channel models and their scalar figures Z(W), E(W) and I(W)."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, ValidationError, model_validator
from scipy import integrate, optimize, special

from relaxpolar.exceptions import ChannelError

logger = logging.getLogger("relaxpolar.channels")

__all__ = [
    "AwgnChannel",
    "BecChannel",
    "DiscreteBms",
    "DiscreteBmsPayload",
    "Channel",
    "awgn_llr",
    "bec_as_dmc",
    "bhattacharyya",
    "binary_entropy",
    "biawgn_capacity",
    "bsc",
    "capacity",
    "check_symmetric",
    "error_probability",
    "q_function",
    "random_symmetric_channel",
]

# Column-sum tolerance for matrices produced internally (polarization keeps
# accumulating rounding); payloads read from JSON use the stricter one.
COLUMN_TOL = 1e-10
PAYLOAD_TOL = 1e-12


class DiscreteBmsPayload(BaseModel):
    """JSON form of a DiscreteBms: {"M": int, "probs": [[w0, w1], ...]}."""

    M: int = Field(ge=1)
    probs: list[tuple[float, float]]

    @model_validator(mode="after")
    def _validate_matrix(self) -> DiscreteBmsPayload:
        if len(self.probs) != self.M:
            raise ValueError(f"probs has {len(self.probs)} rows, expected M={self.M}")
        for row in self.probs:
            for value in row:
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"transition probability out of [0, 1]: {value!r}")
        for x in (0, 1):
            total = math.fsum(row[x] for row in self.probs)
            if abs(total - 1.0) > PAYLOAD_TOL:
                raise ValueError(f"column {x} sums to {total!r}, not 1")
        return self


@dataclass(frozen=True, slots=True, eq=False)
class DiscreteBms:
    """Finite-output binary-input channel with probs[y, x] = W(y|x).

    Symmetry is not enforced; see `check_symmetric`.
    """

    probs: NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise ChannelError(f"transition matrix must have shape (M, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ChannelError("transition probabilities must lie in [0, 1]")
        sums = arr.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > COLUMN_TOL):
            raise ChannelError(f"columns must sum to 1, got {sums.tolist()}")
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    @property
    def outputs(self) -> int:
        return int(self.probs.shape[0])

    def bhattacharyya(self) -> float:
        return bhattacharyya(self)

    def error_probability(self) -> float:
        return error_probability(self)

    def capacity(self) -> float:
        return capacity(self)

    def llr_table(self) -> NDArray[np.float64]:
        """log(W(y|0)/W(y|1)) per output; dead outputs map to 0."""
        w0, w1 = self.probs[:, 0], self.probs[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            table = np.log(w0) - np.log(w1)
        return np.where((w0 == 0.0) & (w1 == 0.0), 0.0, table)

    def transmit_llr(self, codewords: NDArray[np.uint8], rng: np.random.Generator) -> NDArray[np.float64]:
        """Sample channel outputs for `codewords` and return their LLRs."""
        bits = np.asarray(codewords, dtype=np.uint8)
        cdf = np.cumsum(self.probs, axis=0)
        cdf[-1, :] = 1.0
        draws = rng.random(bits.shape)
        outputs = np.where(
            bits == 0,
            np.searchsorted(cdf[:, 0], draws, side="right"),
            np.searchsorted(cdf[:, 1], draws, side="right"),
        )
        outputs = np.minimum(outputs, self.outputs - 1)
        return self.llr_table()[outputs]

    @property
    def label(self) -> str:
        return f"dmc M={self.outputs}"

    def to_dict(self) -> dict[str, Any]:
        return {"M": self.outputs, "probs": self.probs.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DiscreteBms:
        try:
            payload = DiscreteBmsPayload.model_validate(data)
        except ValidationError as exc:
            raise ChannelError(f"Invalid DiscreteBms payload: {exc}") from exc
        return cls(np.array(payload.probs, dtype=np.float64))

    @classmethod
    def from_json(cls, text: str) -> DiscreteBms:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ChannelError(f"Invalid DiscreteBms JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True, slots=True)
class BecChannel:
    """Binary erasure channel with erasure probability p."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ChannelError(f"erasure probability must be in [0, 1], got {self.p!r}")

    def bhattacharyya(self) -> float:
        return self.p

    def error_probability(self) -> float:
        return self.p / 2.0

    def capacity(self) -> float:
        return 1.0 - self.p

    def as_dmc(self) -> DiscreteBms:
        return bec_as_dmc(self.p)

    def transmit_llr(self, codewords: NDArray[np.uint8], rng: np.random.Generator) -> NDArray[np.float64]:
        """Erasures become LLR 0, everything else a signed infinity."""
        bits = np.asarray(codewords, dtype=np.uint8)
        erased = rng.random(bits.shape) < self.p
        known = np.where(bits == 0, np.inf, -np.inf)
        return np.where(erased, 0.0, known)

    @property
    def label(self) -> str:
        return f"bec p={self.p:g}"


@dataclass(frozen=True, slots=True)
class AwgnChannel:
    """BPSK over AWGN: bit 0 -> +1, bit 1 -> -1, noise standard deviation sigma."""

    sigma: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ChannelError(f"sigma must be a positive finite number, got {self.sigma!r}")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> AwgnChannel:
        return cls(sigma=10.0 ** (-snr_db / 20.0))

    @classmethod
    def from_capacity(cls, target: float) -> AwgnChannel:
        """Noise level whose BI-AWGN capacity equals `target`."""
        if not 0.0 < target < 1.0:
            raise ChannelError(f"capacity target must be in (0, 1), got {target!r}")
        try:
            sigma = optimize.brentq(lambda s: biawgn_capacity(s) - target, 1e-2, 1e2, xtol=1e-14)
        except ValueError as exc:
            raise ChannelError(f"cannot match capacity {target!r}: {exc}") from exc
        logger.debug("capacity %.6f -> sigma %.9f", target, sigma)
        return cls(sigma=float(sigma))

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(1.0 / self.sigma**2)

    @property
    def mean_llr(self) -> float:
        return 2.0 / self.sigma**2

    def capacity(self) -> float:
        return biawgn_capacity(self.sigma)

    def bhattacharyya(self) -> float:
        return math.exp(-1.0 / (2.0 * self.sigma**2))

    def error_probability(self) -> float:
        return q_function(1.0 / self.sigma)

    def transmit_llr(self, codewords: NDArray[np.uint8], rng: np.random.Generator) -> NDArray[np.float64]:
        bits = np.asarray(codewords, dtype=np.uint8)
        received = (1.0 - 2.0 * bits) + self.sigma * rng.standard_normal(bits.shape)
        return awgn_llr(received, self.sigma)

    @property
    def label(self) -> str:
        return f"awgn snr={self.snr_db:.4g}dB"


Channel = BecChannel | AwgnChannel | DiscreteBms


def bhattacharyya(ch: DiscreteBms) -> float:
    """Z(W) = sum_y sqrt(W(y|0) W(y|1))."""
    z = float(np.sqrt(ch.probs[:, 0] * ch.probs[:, 1]).sum())
    return min(max(z, 0.0), 1.0)


def error_probability(ch: DiscreteBms) -> float:
    """ML bit error probability with fair tie-breaking."""
    e = 0.5 * float(np.minimum(ch.probs[:, 0], ch.probs[:, 1]).sum())
    return min(max(e, 0.0), 0.5)


def capacity(ch: DiscreteBms) -> float:
    """Symmetric capacity in bits (uniform input)."""
    w = ch.probs
    mix = 0.5 * (w[:, 0] + w[:, 1])
    nats = 0.5 * float(np.sum(special.xlogy(w, w) - special.xlogy(w, mix[:, None])))
    return min(max(nats / math.log(2.0), 0.0), 1.0)


def check_symmetric(ch: DiscreteBms, tol: float = 1e-12) -> bool:
    """True iff some output permutation pi satisfies W(y|0) = W(pi(y)|1)."""
    col0 = np.sort(ch.probs[:, 0])
    col1 = np.sort(ch.probs[:, 1])
    return bool(np.allclose(col0, col1, rtol=0.0, atol=tol))


def bec_as_dmc(p: float) -> DiscreteBms:
    """BEC(p) with outputs ordered (0, erasure, 1)."""
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"erasure probability must be in [0, 1], got {p!r}")
    return DiscreteBms(np.array([[1.0 - p, 0.0], [p, p], [0.0, 1.0 - p]]))


def bsc(q: float) -> DiscreteBms:
    """Binary symmetric channel with crossover probability q."""
    if not 0.0 <= q <= 1.0:
        raise ChannelError(f"crossover probability must be in [0, 1], got {q!r}")
    return DiscreteBms(np.array([[1.0 - q, q], [q, 1.0 - q]]))


def random_symmetric_channel(rng: np.random.Generator, pairs: int = 2) -> DiscreteBms:
    """Random symmetric channel with 2*pairs outputs arranged in mirrored pairs."""
    if pairs < 1:
        raise ChannelError("need at least one output pair")
    mass = rng.dirichlet(np.ones(pairs))
    split = rng.random(pairs)
    rows = []
    for m, s in zip(mass, split):
        rows.append([m * s, m * (1.0 - s)])
        rows.append([m * (1.0 - s), m * s])
    return DiscreteBms(np.array(rows))


def awgn_llr(y: Any, sigma: float) -> Any:
    """log(W(y|0)/W(y|1)) = 2y/sigma^2 for BPSK 0 -> +1."""
    if sigma <= 0.0:
        raise ChannelError(f"sigma must be positive, got {sigma!r}")
    if np.ndim(y) == 0:
        return 2.0 * float(y) / sigma**2
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma**2


def binary_entropy(x: Any) -> Any:
    """h2(x) in bits."""
    x = np.asarray(x, dtype=np.float64)
    h = -(special.xlogy(x, x) + special.xlogy(1.0 - x, 1.0 - x)) / math.log(2.0)
    return float(h) if h.ndim == 0 else h


def q_function(x: Any) -> Any:
    """Gaussian tail probability Q(x)."""
    q = 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))
    return float(q) if np.ndim(q) == 0 else q


def biawgn_capacity(sigma: float) -> float:
    """Capacity of BPSK over AWGN, 1 - E[log2(1 + exp(-L))] with L ~ N(2/s^2, 4/s^2)."""
    if sigma <= 0.0:
        raise ChannelError(f"sigma must be positive, got {sigma!r}")
    var = sigma**2

    def integrand(y: float) -> float:
        density = math.exp(-((y - 1.0) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
        return density * float(np.logaddexp(0.0, -2.0 * y / var))

    span = 12.0 * sigma
    loss, _ = integrate.quad(integrand, 1.0 - span, 1.0 + span, points=[0.0] if span > 1.0 else None, limit=200)
    return min(max(1.0 - loss / math.log(2.0), 0.0), 1.0)
