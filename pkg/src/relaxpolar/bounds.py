"""Complexity and latency accounting for relaxation maps, and complexity-reduction bounds on the BEC."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from relaxpolar.exceptions import ConstructionError, DomainError
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.polarization.construct import (
    DesignTarget,
    Scenario,
    construct_fp,
    construct_mrp,
    construct_relaxed,
    thresholds_from_target,
)
from relaxpolar.polarization.maps import RelaxationMap, subtree_rate_labels
from relaxpolar.polarization.trees import ReliabilityTree, bec_z_tree

logger = logging.getLogger("relaxpolar.bounds")

__all__ = [
    "AcBounds",
    "AsymptoticBounds",
    "BoundsReport",
    "DualityReport",
    "FiniteBounds",
    "LatencyMode",
    "ac_bounds",
    "asymptotic_bounds",
    "bc_bounds",
    "decoding_cr",
    "duality_check",
    "evaluate_bounds",
    "gc_bounds",
    "latency_cycles",
    "latency_reduction",
    "measured_cr",
    "rate_loss",
    "skipped_ops",
]

# Slack for comparing bounds with measured reductions.
_SANDWICH_TOL = 1e-12


class LatencyMode(str, enum.Enum):
    SC_FP = "sc_fp"
    RSCD = "rscd"
    SSCD_FP = "sscd_fp"
    SSCD_RP = "sscd_rp"


def measured_cr(relaxation: RelaxationMap) -> float:
    """Skipped polarization operations over n N.

    A relaxed node of size S above the leaves skips its S combine operations.
    """
    n = relaxation.n
    if n == 0:
        return 0.0
    return skipped_ops(relaxation) / (n * 2**n)


def skipped_ops(relaxation: RelaxationMap) -> int:
    n = relaxation.n
    return sum(int(relaxation.levels[t].sum()) * 2 ** (n - t) for t in range(n))


def decoding_cr(code: CodeSpec, mode: LatencyMode | str, *, rate_zero: bool = True) -> float:
    """Decoding complexity reduction of `code` under a decoder schedule.

    SSCD modes skip rate-1 subtrees (and rate-0 ones unless `rate_zero` is
    false); re-encoding at rate-1 nodes is not counted.
    """
    mode = LatencyMode(mode)
    if mode is LatencyMode.SC_FP:
        return 0.0
    if mode is LatencyMode.RSCD:
        return measured_cr(code.relaxation)
    labels = subtree_rate_labels(code.info_mask, rate_one=True, rate_zero=rate_zero)
    if mode is LatencyMode.SSCD_FP:
        return measured_cr(labels)
    return measured_cr(labels.union(code.relaxation))


def latency_cycles(code: CodeSpec, mode: LatencyMode | str) -> int:
    """Clock cycles of a fully parallel SC decoder, evaluated bottom-up.

    A leaf costs nothing and a plain node 3 + left + right, so the fully
    polarized decoder takes 3N - 3.  A relaxed subtree costs 1 cycle, or 0
    when all its leaves are frozen.  Under SSCD a rate-0 node costs 0 and a
    rate-1 node at level t costs 1 + (n - t) for the re-encoding.
    """
    mode = LatencyMode(mode)
    n = code.n
    mask = code.info_mask
    relaxed = code.relaxation.levels
    use_relaxation = mode in (LatencyMode.RSCD, LatencyMode.SSCD_RP)
    use_rates = mode in (LatencyMode.SSCD_FP, LatencyMode.SSCD_RP)
    if use_rates:
        rate_one = subtree_rate_labels(mask, rate_one=True).levels
        rate_zero = subtree_rate_labels(mask, rate_one=False, rate_zero=True).levels

    cycles = np.zeros(2**n, dtype=np.int64)
    for t in range(n - 1, -1, -1):
        level = 3 + cycles[0::2] + cycles[1::2]
        if use_rates:
            level = np.where(rate_one[t], 1 + (n - t), level)
            level = np.where(rate_zero[t], 0, level)
        if use_relaxation:
            any_info = mask.reshape(2**t, 2 ** (n - t)).any(axis=1)
            level = np.where(relaxed[t], any_info.astype(np.int64), level)
        cycles = level
    return int(cycles[0])


def latency_reduction(code: CodeSpec, mode: LatencyMode | str) -> float:
    """1 - latency / (3N - 3)."""
    baseline = 3 * code.length - 3
    if baseline == 0:
        return 0.0
    return 1.0 - latency_cycles(code, mode) / baseline


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")


def _levels_to(threshold: float, base: float) -> int:
    """ceil(log2(log2 threshold / log2 base)): first level where base^(2^t) <= threshold."""
    return math.ceil(math.log2(math.log2(threshold) / math.log2(base)))


@dataclass(frozen=True, slots=True)
class FiniteBounds:
    """Upper bound and the two lower bounds on one side (good or bad) of the relaxation.

    `t_first` is the first level where relaxation can occur; `lb2_guard` is
    false when the second lower bound had to use the truncated summation.
    """

    ub: float
    lb1: float
    lb2: float
    t_first: int
    t_r: int
    t_level: int
    fraction: float
    odd_fraction: float
    fraction_half: float
    ub_clamped: bool
    lb2_guard: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _fraction_at_most(z: NDArray[np.float64], bound: float) -> float:
    return float(np.count_nonzero(z <= bound)) / z.size


def _finite_bounds(
    z_levels: tuple[NDArray[np.float64], ...],
    base: float,
    n: int,
    threshold: float,
    pivot: float,
    t_level: int | None,
) -> FiniteBounds:
    """Bounds for relaxation at z < threshold on a tree whose root is `base`."""
    _check_unit("channel parameter", base)
    _check_unit("threshold", threshold)
    _check_unit("intermediate threshold", pivot)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")

    t_first = _levels_to(threshold, base)
    ub_clamped = t_first >= n
    ub = max(0.0, (n - t_first) / n)

    t_start = max(0, _levels_to(pivot, base))
    t_r = max(0, _levels_to(threshold, pivot))
    last = n - t_r
    lb1 = 0.0
    best_level = t_start
    best_fraction = 0.0
    candidates = [t_level] if t_level is not None else range(t_start, last + 1)
    for t in candidates:
        if not 0 <= t <= last:
            continue
        fraction = _fraction_at_most(z_levels[t], pivot)
        value = fraction * 2.0**-t_r * (last - t) / n
        if value > lb1:
            lb1 = value
            best_level, best_fraction = t, fraction

    t_odd = max(0, math.ceil(math.log2((math.log2(pivot) - 1.0) / math.log2(base))) + 1)
    odd_fraction = 0.0
    lb2 = 0.0
    guard = t_odd + 2 * t_r > n
    if t_odd <= last:
        odd_fraction = min(
            float(np.count_nonzero(z_levels[t][0::2] <= pivot)) / 2**t for t in range(t_odd, last + 1)
        )
        upper = last if guard else min(t_odd + t_r, last)
        lb2 = sum(odd_fraction * 2.0**-t_r * (last - t0) / n for t0 in range(t_odd, upper + 1))
    return FiniteBounds(
        ub=ub,
        lb1=lb1,
        lb2=lb2,
        t_first=t_first,
        t_r=t_r,
        t_level=best_level,
        fraction=best_fraction,
        odd_fraction=odd_fraction,
        fraction_half=best_fraction / 2.0,
        ub_clamped=ub_clamped,
        lb2_guard=guard,
    )


def gc_bounds(
    p: float,
    n: int,
    threshold: float,
    pivot: float,
    tree: ReliabilityTree | None = None,
    *,
    t_gamma: int | None = None,
) -> FiniteBounds:
    """Good-side bounds on BEC(p) for relaxation at Z < threshold, with intermediate threshold B = pivot.

    The first lower bound is maximised over the level t_gamma unless one is given.
    """
    _check_unit("erasure probability", p)
    tree = tree or bec_z_tree(p, n)
    return _finite_bounds(tree.z, p, n, threshold, pivot, t_gamma)


def bc_bounds(
    p: float,
    n: int,
    threshold: float,
    pivot: float,
    tree: ReliabilityTree | None = None,
    *,
    t_beta: int | None = None,
) -> FiniteBounds:
    """Bad-side bounds on BEC(p) for relaxation at Z > 1 - threshold, counting nodes with Z >= 1 - pivot.

    Evaluated as the good-side bounds on the mirrored complement tree, which
    is the tree of BEC(1 - p); odd indices there are even ones here.
    """
    _check_unit("erasure probability", p)
    tree = tree or bec_z_tree(p, n)
    if tree.zc is None:
        raise DomainError("bad-side bounds need a BEC tree with complements")
    mirrored = tuple(level[::-1] for level in tree.zc)
    return _finite_bounds(mirrored, 1.0 - p, n, threshold, pivot, t_beta)


@dataclass(frozen=True, slots=True)
class AcBounds:
    ub: float
    lb: float
    lb2: float
    lb2_guard: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def ac_bounds(gc: FiniteBounds, bc: FiniteBounds, p: float) -> AcBounds:
    """Upper bound from the side that starts relaxing first; lower bounds add up."""
    ub = gc.ub if p <= 0.5 else bc.ub
    return AcBounds(ub=ub, lb=gc.lb1 + bc.lb1, lb2=gc.lb2 + bc.lb2, lb2_guard=gc.lb2_guard and bc.lb2_guard)


@dataclass(frozen=True, slots=True)
class AsymptoticBounds:
    gc: float
    bc: float
    combined: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def asymptotic_bounds(capacity: float, beta: float, n: int, delta: float, epsilon: float) -> AsymptoticBounds:
    """Large-n reductions: (C - eps)(1 - (2 + delta) beta) and (1 - C - eps)(1 - (2 + delta) log n / n)."""
    if not 0.0 < beta < 0.5:
        raise DomainError(f"beta must lie in (0, 1/2), got {beta!r}")
    if not 0.0 < delta < 1.0 / beta - 2.0:
        raise DomainError(f"delta must lie in (0, {1.0 / beta - 2.0:.6g}), got {delta!r}")
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if not 0.0 <= capacity <= 1.0:
        raise DomainError(f"capacity must lie in [0, 1], got {capacity!r}")
    gc = max(0.0, (capacity - epsilon) * (1.0 - (2.0 + delta) * beta))
    bc = max(0.0, (1.0 - capacity - epsilon) * (1.0 - (2.0 + delta) * math.log2(n) / n))
    return AsymptoticBounds(gc=gc, bc=bc, combined=1.0 - 2.0 * beta * capacity)


def rate_loss(fp: CodeSpec, rp: CodeSpec) -> float:
    """R_FP - R_RP; negative when relaxation admits more positions."""
    if fp.length != rp.length:
        raise ConstructionError(f"cannot compare codes of length {fp.length} and {rp.length}")
    return fp.rate - rp.rate


@dataclass(frozen=True, slots=True)
class DualityReport:
    max_z_gap: float
    sets_match: bool
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {"max_z_gap": self.max_z_gap, "sets_match": self.sets_match, "pass": self.passed}


def _hereditary(triggers: list[NDArray[np.bool_]]) -> list[NDArray[np.bool_]]:
    levels = [triggers[0].copy()]
    for flags in triggers[1:]:
        levels.append(np.repeat(levels[-1], 2) | flags)
    return levels


def duality_check(p: float, n: int, threshold: float, tol: float = 1e-12) -> DualityReport:
    """BEC(p) and BEC(1 - p) trees are mirror images with Z -> 1 - Z.

    Also compares the good-side relaxed set of BEC(1 - p) at Z < threshold
    with the mirrored bad-side set of BEC(p) at Z > 1 - threshold.
    """
    _check_unit("erasure probability", p)
    tree = bec_z_tree(p, n)
    dual = bec_z_tree(1.0 - p, n)
    gap = max(float(np.max(np.abs(z - (1.0 - zd[::-1])))) for z, zd in zip(tree.z, dual.z))

    good = _hereditary([zd < threshold for zd in dual.z])
    bad = _hereditary([zc < threshold for zc in tree.zc])
    sets_match = all(np.array_equal(g, b[::-1]) for g, b in zip(good, bad))
    passed = gap <= tol and sets_match
    if not passed:
        logger.warning("duality check failed for p=%g, n=%d: gap=%.3g, sets_match=%s", p, n, gap, sets_match)
    return DualityReport(max_z_gap=gap, sets_match=sets_match, passed=passed)


@dataclass(slots=True)
class BoundsReport:
    """Bounds, measured reductions and latencies for one BEC grid point."""

    p: float
    n: int
    fer_target: float
    tg: float
    pivot_good: float
    pivot_bad: float
    measured_gc: float
    measured_bc: float
    measured_ac: float
    rate_loss_ac: float
    gc: FiniteBounds
    bc: FiniteBounds
    ac: AcBounds
    asymptotic: AsymptoticBounds | None
    latency: dict[str, int]
    violations: list[str] = field(default_factory=list)

    @property
    def measured_cr(self) -> float:
        return self.measured_ac

    def to_row(self) -> dict[str, Any]:
        """Flat mapping for one CSV row."""
        row: dict[str, Any] = {
            "p": self.p,
            "n": self.n,
            "fer_target": self.fer_target,
            "tg": self.tg,
            "measured_gc": self.measured_gc,
            "measured_bc": self.measured_bc,
            "measured_ac": self.measured_ac,
            "rate_loss_ac": self.rate_loss_ac,
        }
        for side, bounds in (("gc", self.gc), ("bc", self.bc)):
            row[f"{side}_ub"] = bounds.ub
            row[f"{side}_lb1"] = bounds.lb1
            row[f"{side}_lb2"] = bounds.lb2
            row[f"{side}_lb2_guard"] = bounds.lb2_guard
        row["ac_ub"] = self.ac.ub
        row["ac_lb"] = self.ac.lb
        row["ac_lb2"] = self.ac.lb2
        row["asym_gc"] = self.asymptotic.gc if self.asymptotic else ""
        row["asym_bc"] = self.asymptotic.bc if self.asymptotic else ""
        for mode in LatencyMode:
            row[f"latency_{mode.value}"] = self.latency[mode.value]
        row["violations"] = ";".join(self.violations)
        return row

    def to_dict(self) -> dict[str, Any]:
        return {
            **{k: v for k, v in self.to_row().items() if not k.startswith(("gc_", "bc_", "ac_", "asym_"))},
            "violations": list(self.violations),
            "gc": self.gc.to_dict(),
            "bc": self.bc.to_dict(),
            "ac": self.ac.to_dict(),
            "asymptotic": self.asymptotic.to_dict() if self.asymptotic else None,
            "latency": dict(self.latency),
        }


def _sandwich(name: str, lb: float, measured: float, ub: float, violations: list[str]) -> None:
    if lb > measured + _SANDWICH_TOL:
        violations.append(f"{name}: lb {lb:.6g} > measured {measured:.6g}")
    if measured > ub + _SANDWICH_TOL:
        violations.append(f"{name}: measured {measured:.6g} > ub {ub:.6g}")


def evaluate_bounds(
    p: float,
    n: int,
    fer_target: float,
    *,
    pivot_good: float | None = None,
    pivot_bad: float | None = None,
    beta: float | None = None,
    delta: float | None = None,
    epsilon: float | None = None,
) -> BoundsReport:
    """One grid point: GC/BC/AC maps built at FER target E, their CR, and every bound.

    Defaults B = 2p - p^2 and G = 1 - p^2; the Z threshold is 2E/N.
    Second lower bounds that needed the truncated summation are not checked.
    """
    _check_unit("erasure probability", p)
    tree = bec_z_tree(p, n)
    length = 2**n
    thresholds = thresholds_from_target(fer_target, 1.0, length, bec=True)
    tg = thresholds.tg
    target = DesignTarget(fer=fer_target)
    fp = construct_fp(tree, target)
    codes = {s: construct_relaxed(tree, s, thresholds, target) for s in (Scenario.GC, Scenario.BC, Scenario.AC)}
    measured = {s: measured_cr(code.relaxation) for s, code in codes.items()}

    pivot_good = 2.0 * p - p * p if pivot_good is None else pivot_good
    pivot_bad = 1.0 - p * p if pivot_bad is None else pivot_bad
    gc = gc_bounds(p, n, tg, pivot_good, tree)
    bc = bc_bounds(p, n, tg, pivot_bad, tree)
    ac = ac_bounds(gc, bc, p)

    asymptotic = None
    if beta is not None and delta is not None and epsilon is not None:
        asymptotic = asymptotic_bounds(1.0 - p, beta, n, delta, epsilon)

    ac_code = codes[Scenario.AC]
    mrp = construct_mrp(fp, tree, Scenario.AC_MRP)
    latency = {
        LatencyMode.SC_FP.value: latency_cycles(fp, LatencyMode.SC_FP),
        LatencyMode.RSCD.value: latency_cycles(ac_code, LatencyMode.RSCD),
        LatencyMode.SSCD_FP.value: latency_cycles(fp, LatencyMode.SSCD_FP),
        LatencyMode.SSCD_RP.value: latency_cycles(mrp, LatencyMode.SSCD_RP),
    }

    violations: list[str] = []
    _sandwich("gc", gc.lb1, measured[Scenario.GC], gc.ub, violations)
    _sandwich("bc", bc.lb1, measured[Scenario.BC], bc.ub, violations)
    _sandwich("ac", ac.lb, measured[Scenario.AC], ac.ub, violations)
    if gc.lb2_guard:
        _sandwich("gc lb2", gc.lb2, measured[Scenario.GC], gc.ub, violations)
    if bc.lb2_guard:
        _sandwich("bc lb2", bc.lb2, measured[Scenario.BC], bc.ub, violations)
    if gc.lb2_guard and bc.lb2_guard:
        _sandwich("ac lb2", ac.lb2, measured[Scenario.AC], ac.ub, violations)
    for message in violations:
        logger.warning("p=%g n=%d: sandwich violation %s", p, n, message)

    return BoundsReport(
        p=p,
        n=n,
        fer_target=fer_target,
        tg=tg,
        pivot_good=pivot_good,
        pivot_bad=pivot_bad,
        measured_gc=measured[Scenario.GC],
        measured_bc=measured[Scenario.BC],
        measured_ac=measured[Scenario.AC],
        rate_loss_ac=rate_loss(fp, ac_code),
        gc=gc,
        bc=bc,
        ac=ac,
        asymptotic=asymptotic,
        latency=latency,
        violations=violations,
    )
