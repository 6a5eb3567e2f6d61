"""Relaxation maps over the polarization tree.

Node (t, i) sits at level t with 1-based index i in [1, 2^t]; its children
are (t+1, 2i-1) (minus) and (t+1, 2i) (plus).  Arrays are stored 0-based,
so level t holds a boolean vector of length 2^t.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, ValidationError, model_validator

from relaxpolar.exceptions import ConstructionError

__all__ = [
    "RelaxationMap",
    "RelaxationMapPayload",
    "random_relaxation_map",
    "subtree_rate_labels",
]


class RelaxationMapPayload(BaseModel):
    """{"n": int, "levels": [hex bitmap per level, MSB = index 1]}."""

    n: int = Field(ge=0, le=30)
    levels: list[str]

    @model_validator(mode="after")
    def _validate_levels(self) -> RelaxationMapPayload:
        if len(self.levels) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} levels, got {len(self.levels)}")
        for t, text in enumerate(self.levels):
            expected = _hex_width(t)
            if len(text) != expected:
                raise ValueError(f"level {t}: expected {expected} hex digits, got {len(text)}")
            try:
                int(text, 16)
            except ValueError as exc:
                raise ValueError(f"level {t}: not a hex string: {text!r}") from exc
        return self


def _hex_width(t: int) -> int:
    return max(1, (2**t + 3) // 4)


def _level_to_hex(bits: NDArray[np.bool_]) -> str:
    packed = np.packbits(bits.astype(np.uint8)).tobytes().hex()
    return packed[: _hex_width(int(np.log2(bits.size)))]


def _hex_to_level(text: str, t: int) -> NDArray[np.bool_]:
    padded = text if len(text) % 2 == 0 else text + "0"
    bits = np.unpackbits(np.frombuffer(bytes.fromhex(padded), dtype=np.uint8))
    size = 2**t
    if bits[size:].any():
        raise ConstructionError(f"level {t}: padding bits must be zero")
    return bits[:size].astype(bool)


@dataclass(frozen=True, slots=True, eq=False)
class RelaxationMap:
    """Relaxed(t, i) flags; a relaxed node skips its own polarizing transform."""

    levels: tuple[NDArray[np.bool_], ...]

    def __post_init__(self) -> None:
        frozen: list[NDArray[np.bool_]] = []
        for t, level in enumerate(self.levels):
            arr = np.array(level, dtype=bool).reshape(-1)
            if arr.size != 2**t:
                raise ConstructionError(f"level {t} must have {2**t} flags, got {arr.size}")
            arr.flags.writeable = False
            frozen.append(arr)
        if not frozen:
            raise ConstructionError("a relaxation map needs at least the root level")
        for t in range(len(frozen) - 1):
            orphans = np.repeat(frozen[t], 2) & ~frozen[t + 1]
            if orphans.any():
                j = int(np.flatnonzero(orphans)[0])
                raise ConstructionError(
                    f"heredity violated: node ({t}, {j // 2 + 1}) is relaxed but child ({t + 1}, {j + 1}) is not"
                )
        object.__setattr__(self, "levels", tuple(frozen))

    @property
    def n(self) -> int:
        return len(self.levels) - 1

    @property
    def length(self) -> int:
        return 2**self.n

    @classmethod
    def zeros(cls, n: int) -> RelaxationMap:
        return cls(tuple(np.zeros(2**t, dtype=bool) for t in range(n + 1)))

    @classmethod
    def full(cls, n: int) -> RelaxationMap:
        """Every node relaxed, root included: the encoder reduces to the bit-reversal permutation."""
        return cls(tuple(np.ones(2**t, dtype=bool) for t in range(n + 1)))

    def is_relaxed(self, t: int, i: int) -> bool:
        return bool(self.levels[t][i - 1])

    def relaxed_count(self) -> int:
        return int(sum(int(level.sum()) for level in self.levels))

    def maximal_roots(self) -> list[tuple[int, int]]:
        """(t, i) of every relaxed node whose parent is not relaxed."""
        roots: list[tuple[int, int]] = []
        for t, level in enumerate(self.levels):
            parent = np.repeat(self.levels[t - 1], 2) if t else np.zeros(1, dtype=bool)
            roots.extend((t, int(j) + 1) for j in np.flatnonzero(level & ~parent))
        return roots

    def subtree(self, t: int, j: int) -> list[NDArray[np.bool_]]:
        """Flags of the subtree rooted at (t, j+1), re-indexed from its own root."""
        return [self.levels[t + k][j * 2**k : (j + 1) * 2**k] for k in range(self.n - t + 1)]

    def union(self, other: RelaxationMap) -> RelaxationMap:
        if other.n != self.n:
            raise ConstructionError(f"cannot combine maps of depth {self.n} and {other.n}")
        return RelaxationMap(tuple(a | b for a, b in zip(self.levels, other.levels)))

    def equals(self, other: RelaxationMap) -> bool:
        return self.n == other.n and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "levels": [_level_to_hex(level) for level in self.levels]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RelaxationMap:
        try:
            payload = RelaxationMapPayload.model_validate(data)
        except ValidationError as exc:
            raise ConstructionError(f"Invalid relaxation map: {exc}") from exc
        return cls(tuple(_hex_to_level(text, t) for t, text in enumerate(payload.levels)))

    @classmethod
    def from_json(cls, text: str) -> RelaxationMap:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConstructionError(f"Invalid relaxation map JSON: {exc}") from exc
        return cls.from_dict(data)

    def save(self, path: Path) -> None:
        path.write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> RelaxationMap:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConstructionError(f"Cannot read relaxation map: {exc}") from exc
        return cls.from_json(text)


def subtree_rate_labels(
    info_mask: NDArray[np.bool_],
    *,
    rate_one: bool = True,
    rate_zero: bool = False,
) -> RelaxationMap:
    """Flag every node whose leaves are all information bits and/or all frozen.

    Leaves count as their own subtrees, so the result is hereditary.
    """
    mask = np.asarray(info_mask, dtype=bool)
    n = int(np.log2(mask.size))
    if 2**n != mask.size:
        raise ConstructionError(f"mask length {mask.size} is not a power of two")
    levels = []
    for t in range(n + 1):
        blocks = mask.reshape(2**t, 2 ** (n - t))
        flags = np.zeros(2**t, dtype=bool)
        if rate_one:
            flags |= blocks.all(axis=1)
        if rate_zero:
            flags |= ~blocks.any(axis=1)
        levels.append(flags)
    return RelaxationMap(tuple(levels))


def random_relaxation_map(
    n: int,
    rng: np.random.Generator,
    density: float = 0.2,
    *,
    allow_root: bool = False,
) -> RelaxationMap:
    """Random hereditary map: each node not inherited is relaxed with probability `density`."""
    levels = [np.array([allow_root and rng.random() < density])]
    for t in range(1, n + 1):
        inherited = np.repeat(levels[-1], 2)
        levels.append(inherited | (rng.random(2**t) < density))
    return RelaxationMap(tuple(levels))
