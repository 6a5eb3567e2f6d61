"""Code specifications: good set, CRC settings and relaxation map."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from relaxpolar.exceptions import ConstructionError
from relaxpolar.polarization.maps import RelaxationMap

__all__ = ["CodeSpec", "CodeSpecPayload", "CrcConfig"]


class CrcConfig(BaseModel):
    """CRC register parameters (no reflection, no final XOR)."""

    model_config = ConfigDict(frozen=True)

    width: int = Field(default=16, ge=1, le=64)
    polynomial: int = Field(default=0x1021, ge=1)
    init: int = Field(default=0xFFFF, ge=0)

    @model_validator(mode="after")
    def _validate_ranges(self) -> CrcConfig:
        if self.polynomial >= 1 << self.width:
            raise ValueError(f"polynomial 0x{self.polynomial:x} does not fit in {self.width} bits")
        if self.init >= 1 << self.width:
            raise ValueError(f"init 0x{self.init:x} does not fit in {self.width} bits")
        return self


class CodeSpecPayload(BaseModel):
    """{"n", "good_set": [ints], "crc": {...} | null, "map_ref": path}."""

    n: int = Field(ge=0, le=30)
    good_set: list[int]
    crc: CrcConfig | None = None
    map_ref: str

    @model_validator(mode="after")
    def _validate_good_set(self) -> CodeSpecPayload:
        size = 2**self.n
        if self.good_set != sorted(set(self.good_set)):
            raise ValueError("good_set must be strictly increasing")
        if self.good_set and not (1 <= self.good_set[0] and self.good_set[-1] <= size):
            raise ValueError(f"good_set indices must lie in [1, {size}]")
        return self


@dataclass(frozen=True, slots=True, eq=False)
class CodeSpec:
    """Everything the encoder and decoders need: N, good set Γ (1-based), CRC and map.

    Frozen positions carry the value 0.
    """

    n: int
    good_set: tuple[int, ...]
    relaxation: RelaxationMap
    crc: CrcConfig | None = None
    frozen_value: Literal[0] = 0
    label: str = "fp"
    target_met: bool = True
    info_mask: NDArray[np.bool_] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        good = tuple(int(i) for i in self.good_set)
        size = 2**self.n
        if list(good) != sorted(set(good)):
            raise ConstructionError("good set must be strictly increasing")
        if good and not (1 <= good[0] and good[-1] <= size):
            raise ConstructionError(f"good set indices must lie in [1, {size}]")
        if self.relaxation.n != self.n:
            raise ConstructionError(f"map depth {self.relaxation.n} does not match n={self.n}")
        if self.crc is not None and len(good) < self.crc.width:
            raise ConstructionError(f"good set of size {len(good)} cannot carry a {self.crc.width}-bit CRC")
        mask = np.zeros(size, dtype=bool)
        mask[np.asarray(good, dtype=np.int64) - 1] = True
        mask.flags.writeable = False
        object.__setattr__(self, "good_set", good)
        object.__setattr__(self, "info_mask", mask)

    @property
    def length(self) -> int:
        return 2**self.n

    @property
    def k(self) -> int:
        return len(self.good_set)

    @property
    def rate(self) -> float:
        return self.k / self.length

    @property
    def payload_bits(self) -> int:
        """Information bits excluding the CRC."""
        return self.k - (self.crc.width if self.crc else 0)

    @property
    def info_positions(self) -> NDArray[np.int64]:
        """0-based positions of Γ in u-order."""
        return np.asarray(self.good_set, dtype=np.int64) - 1

    def with_map(self, relaxation: RelaxationMap, label: str) -> CodeSpec:
        return CodeSpec(
            n=self.n,
            good_set=self.good_set,
            relaxation=relaxation,
            crc=self.crc,
            label=label,
            target_met=self.target_met,
        )

    def to_dict(self, map_ref: str) -> dict[str, Any]:
        return {
            "n": self.n,
            "good_set": list(self.good_set),
            "crc": self.crc.model_dump() if self.crc else None,
            "map_ref": map_ref,
        }

    def save(self, path: Path, map_path: Path) -> None:
        """Write the spec and its map; map_ref is stored relative to the spec file."""
        self.relaxation.save(map_path)
        try:
            ref = map_path.relative_to(path.parent).as_posix()
        except ValueError:
            ref = map_path.as_posix()
        path.write_text(json.dumps(self.to_dict(ref), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> CodeSpec:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConstructionError(f"Cannot read code spec: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConstructionError(f"Invalid code spec JSON: {exc}") from exc
        try:
            payload = CodeSpecPayload.model_validate(data)
        except ValidationError as exc:
            raise ConstructionError(f"Invalid code spec: {exc}") from exc
        map_path = Path(payload.map_ref)
        if not map_path.is_absolute():
            map_path = path.parent / map_path
        relaxation = RelaxationMap.load(map_path)
        return cls(n=payload.n, good_set=tuple(payload.good_set), relaxation=relaxation, crc=payload.crc)
