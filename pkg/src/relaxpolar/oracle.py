"""Exact polarization on small-alphabet channels.

Everything here is brute force and serves as ground truth for the
recursions used elsewhere in the package.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from relaxpolar.channels import DiscreteBms, bhattacharyya, capacity, error_probability
from relaxpolar.exceptions import ResourceLimitError

logger = logging.getLogger("relaxpolar.oracle")

DEFAULT_ALPHABET_CAP = 1_000_000

# Relative tolerance for treating two likelihood ratios as equal.
MERGE_RTOL = 1e-9


@dataclass(frozen=True, slots=True, eq=False)
class BitChannelExact:
    """An exact bit-channel together with the +/- path that produced it."""

    channel: DiscreteBms
    lineage: str

    @property
    def level(self) -> int:
        return len(self.lineage)

    def bhattacharyya(self) -> float:
        return bhattacharyya(self.channel)

    def error_probability(self) -> float:
        return error_probability(self.channel)

    def capacity(self) -> float:
        return capacity(self.channel)


@dataclass(frozen=True, slots=True)
class AppendixLemmaReport:
    """E(W-) = 2E - 2E^2 and E(W+) >= 2E^2 evaluated on one channel."""

    e: float
    e_minus_exact: float
    e_minus_formula: float
    e_plus_exact: float
    e_plus_lb: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "e": self.e,
            "e_minus_exact": self.e_minus_exact,
            "e_minus_formula": self.e_minus_formula,
            "e_plus_exact": self.e_plus_exact,
            "e_plus_lb": self.e_plus_lb,
            "pass": self.passed,
        }


@dataclass(frozen=True, slots=True)
class RecursionReport:
    """Bhattacharyya and capacity relations across one polarization step."""

    z: float
    z_minus: float
    z_plus: float
    i: float
    i_minus: float
    i_plus: float

    @property
    def z_plus_exact(self) -> bool:
        return abs(self.z_plus - self.z * self.z) <= 1e-10

    @property
    def z_minus_bounded(self) -> bool:
        return self.z_minus <= 2.0 * self.z - self.z * self.z + 1e-12

    @property
    def z_minus_tight(self) -> bool:
        return abs(self.z_minus - (2.0 * self.z - self.z * self.z)) <= 1e-10

    @property
    def conserved(self) -> bool:
        return abs(self.i_minus + self.i_plus - 2.0 * self.i) <= 1e-9

    @property
    def ordered(self) -> bool:
        return self.i_minus <= self.i + 1e-12 and self.i <= self.i_plus + 1e-12

    def to_dict(self) -> dict[str, Any]:
        return {
            "z": self.z,
            "z_minus": self.z_minus,
            "z_plus": self.z_plus,
            "i": self.i,
            "i_minus": self.i_minus,
            "i_plus": self.i_plus,
            "z_plus_exact": self.z_plus_exact,
            "z_minus_bounded": self.z_minus_bounded,
            "conserved": self.conserved,
            "ordered": self.ordered,
        }


def merge_outputs(probs: NDArray[np.float64], rtol: float = MERGE_RTOL) -> NDArray[np.float64]:
    """Merge outputs with equal likelihood ratio and drop outputs that never occur.

    Two ratios count as equal when they agree to relative tolerance `rtol`,
    compared as log-ratios; infinite ratios only merge with each other.
    The merge keeps Z, E and I unchanged.
    """
    total = probs.sum(axis=1)
    live = probs[total > 0.0]
    if live.shape[0] == 0:
        return np.zeros((0, 2))
    with np.errstate(divide="ignore"):
        log_ratio = np.log(live[:, 0]) - np.log(live[:, 1])
    order = np.argsort(log_ratio, kind="stable")
    ordered = log_ratio[order]
    with np.errstate(invalid="ignore"):
        same = (ordered[1:] == ordered[:-1]) | (np.diff(ordered) <= rtol)
    groups = np.concatenate([[0], np.cumsum(~same)])
    merged = np.zeros((int(groups[-1]) + 1, 2))
    np.add.at(merged, groups, live[order])
    return merged


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise ResourceLimitError(f"{what} would need {size} outputs, cap is {cap}")


def polarize_minus(w: DiscreteBms, *, cap: int = DEFAULT_ALPHABET_CAP, merge: bool = True) -> DiscreteBms:
    """W-(y1,y2|u1) = 1/2 sum_u2 W(y1|u1+u2) W(y2|u2), outputs indexed y1*M + y2."""
    _check_cap(w.outputs**2, cap, "W-")
    p0, p1 = w.probs[:, 0], w.probs[:, 1]
    col0 = 0.5 * (np.outer(p0, p0) + np.outer(p1, p1)).ravel()
    col1 = 0.5 * (np.outer(p1, p0) + np.outer(p0, p1)).ravel()
    probs = np.column_stack([col0, col1])
    return DiscreteBms(merge_outputs(probs) if merge else probs)


def polarize_plus(w: DiscreteBms, *, cap: int = DEFAULT_ALPHABET_CAP, merge: bool = True) -> DiscreteBms:
    """W+(y1,y2,u1|u2) = 1/2 W(y1|u1+u2) W(y2|u2), outputs indexed u1*M^2 + y1*M + y2."""
    _check_cap(2 * w.outputs**2, cap, "W+")
    p0, p1 = w.probs[:, 0], w.probs[:, 1]
    col0 = 0.5 * np.concatenate([np.outer(p0, p0).ravel(), np.outer(p1, p0).ravel()])
    col1 = 0.5 * np.concatenate([np.outer(p1, p1).ravel(), np.outer(p0, p1).ravel()])
    probs = np.column_stack([col0, col1])
    return DiscreteBms(merge_outputs(probs) if merge else probs)


def lineage_of(n: int, i: int) -> str:
    """Binary expansion of i-1 (MSB first) with 0 -> '-' and 1 -> '+'."""
    if n < 0:
        raise ValueError(f"level must be non-negative, got {n}")
    if not 1 <= i <= 2**n:
        raise ValueError(f"bit index {i} outside [1, {2**n}]")
    return "".join("+" if (i - 1) >> (n - 1 - k) & 1 else "-" for k in range(n))


def exact_bit_channel(
    w: DiscreteBms,
    n: int,
    i: int,
    *,
    cap: int = DEFAULT_ALPHABET_CAP,
) -> BitChannelExact:
    """The i-th bit-channel of length 2^n built by composing exact transforms."""
    lineage = lineage_of(n, i)
    channel = w
    for step in lineage:
        channel = polarize_plus(channel, cap=cap) if step == "+" else polarize_minus(channel, cap=cap)
    logger.debug("bit-channel n=%d i=%d lineage=%s outputs=%d", n, i, lineage, channel.outputs)
    return BitChannelExact(channel=channel, lineage=lineage)


def verify_appendix_lemma(w: DiscreteBms) -> AppendixLemmaReport:
    e = error_probability(w)
    e_minus = error_probability(polarize_minus(w))
    e_plus = error_probability(polarize_plus(w))
    formula = 2.0 * e - 2.0 * e * e
    lower = 2.0 * e * e
    passed = abs(e_minus - formula) <= 1e-10 and e_plus >= lower - 1e-12
    return AppendixLemmaReport(
        e=e,
        e_minus_exact=e_minus,
        e_minus_formula=formula,
        e_plus_exact=e_plus,
        e_plus_lb=lower,
        passed=passed,
    )


def recursion_report(w: DiscreteBms) -> RecursionReport:
    minus = polarize_minus(w)
    plus = polarize_plus(w)
    return RecursionReport(
        z=bhattacharyya(w),
        z_minus=bhattacharyya(minus),
        z_plus=bhattacharyya(plus),
        i=capacity(w),
        i_minus=capacity(minus),
        i_plus=capacity(plus),
    )
