"""Code construction: fully polarized, relaxed (GC / BC / AC) and modified relaxed codes."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy import optimize, special

from relaxpolar.channels import AwgnChannel, BecChannel, Channel, binary_entropy
from relaxpolar.exceptions import ConstructionError
from relaxpolar.polarization.codespec import CodeSpec, CrcConfig
from relaxpolar.polarization.genie import mc_genie_bit_error
from relaxpolar.polarization.maps import RelaxationMap, subtree_rate_labels
from relaxpolar.polarization.trees import ReliabilityTree, bec_z_tree, ga_reliability_tree

logger = logging.getLogger("relaxpolar.construct")

__all__ = [
    "CodeDesign",
    "DesignTarget",
    "FerOrderingReport",
    "Scenario",
    "Thresholds",
    "construct_fp",
    "construct_mrp",
    "construct_relaxed",
    "design_code",
    "fer_ordering_check",
    "inherited_leaf_figures",
    "reliability_tree_for",
    "select_good_set",
    "thresholds_from_target",
]

_LN2 = math.log(2.0)


class Scenario(str, enum.Enum):
    FP = "fp"
    GC = "gc"
    BC = "bc"
    AC = "ac"
    GC_MRP = "gc-mrp"
    AC_MRP = "ac-mrp"

    @property
    def relaxes_good(self) -> bool:
        return self in (Scenario.GC, Scenario.AC)

    @property
    def relaxes_bad(self) -> bool:
        return self in (Scenario.BC, Scenario.AC)


@dataclass(frozen=True, slots=True)
class DesignTarget:
    """Exactly one of a rate R in (0, 1] or a FER target E in (0, 1)."""

    rate: float | None = None
    fer: float | None = None

    def __post_init__(self) -> None:
        if (self.rate is None) == (self.fer is None):
            raise ConstructionError("give exactly one of rate or fer target")
        if self.rate is not None and not 0.0 < self.rate <= 1.0:
            raise ConstructionError(f"rate must be in (0, 1], got {self.rate!r}")
        if self.fer is not None and not 0.0 < self.fer < 1.0:
            raise ConstructionError(f"FER target must be in (0, 1), got {self.fer!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"rate": self.rate, "fer": self.fer}


@dataclass(frozen=True, slots=True)
class Thresholds:
    """Good threshold eg on the EP and bad threshold expressed as its gap eb_gap = 1/2 - eb."""

    eg: float
    eb_gap: float

    @classmethod
    def from_eb(cls, eg: float, eb: float) -> Thresholds:
        return cls(eg=eg, eb_gap=0.5 - eb)

    @property
    def eb(self) -> float:
        return 0.5 - self.eb_gap

    @property
    def tg(self) -> float:
        """Z-domain good threshold (BEC)."""
        return 2.0 * self.eg

    @property
    def tb(self) -> float:
        return 1.0 - 2.0 * self.eb_gap

    def to_dict(self) -> dict[str, Any]:
        return {"eg": self.eg, "eb": self.eb, "eb_gap": self.eb_gap, "tg": self.tg, "tb": self.tb}


def _entropy_gap(eg: float) -> float:
    """delta with h2(1/2 - delta) = 1 - h2(eg)."""
    target = float(binary_entropy(eg))

    def excess(delta: float) -> float:
        spread = special.xlog1py(1.0 - 2.0 * delta, -2.0 * delta) + special.xlog1py(1.0 + 2.0 * delta, 2.0 * delta)
        return spread / (2.0 * _LN2) - target

    return float(optimize.brentq(excess, 0.0, 0.5, xtol=1e-15))


def _thresholds_for(eg: float, *, bec: bool) -> Thresholds:
    if eg >= 0.5:
        raise ConstructionError(f"invalid target: good threshold {eg!r} is not below 1/2")
    if eg <= 0.0:
        return Thresholds(eg=0.0, eb_gap=0.0)
    if bec:
        # H(E) = 2E on the BEC.
        return Thresholds(eg=eg, eb_gap=eg)
    return Thresholds(eg=eg, eb_gap=_entropy_gap(eg))


def thresholds_from_target(fer: float, rate: float, length: int, *, bec: bool = True) -> Thresholds:
    """eg = E / (R N); eb from H(eb) = 1 - H(eg), with H(E) = 2E on the BEC."""
    if not 0.0 < fer < 1.0:
        raise ConstructionError(f"FER target must be in (0, 1), got {fer!r}")
    if not 0.0 < rate <= 1.0:
        raise ConstructionError(f"rate must be in (0, 1], got {rate!r}")
    return _thresholds_for(fer / (rate * length), bec=bec)


def select_good_set(
    errors: NDArray[np.float64],
    key: NDArray[np.float64],
    *,
    count: int | None = None,
    fer: float | None = None,
) -> tuple[int, ...]:
    """Most reliable indices (1-based, sorted) by `key`; ties go to the larger index.

    With `count` the first `count` indices are taken, with `fer` the longest
    prefix whose summed `errors` stays within the target.
    """
    size = errors.size
    order = np.lexsort((-np.arange(size), key))
    if count is not None:
        chosen = order[: max(0, min(count, size))]
    elif fer is not None:
        total = np.cumsum(errors[order])
        chosen = order[: int(np.searchsorted(total, fer * (1.0 + 1e-12), side="right"))]
    else:
        raise ConstructionError("select_good_set needs a count or a FER target")
    return tuple(int(i) + 1 for i in np.sort(chosen))


def _good_set_for(
    errors: NDArray[np.float64],
    key: NDArray[np.float64],
    target: DesignTarget,
    crc: CrcConfig | None,
) -> tuple[tuple[int, ...], bool]:
    width = crc.width if crc else 0
    if target.rate is not None:
        count = round(target.rate * errors.size) + width
        if count > errors.size:
            raise ConstructionError(f"rate {target.rate} plus a {width}-bit CRC exceeds N={errors.size}")
        return select_good_set(errors, key, count=count), True
    good = select_good_set(errors, key, fer=target.fer)
    if not good:
        logger.warning("FER target %g is unreachable at N=%d: no position qualifies", target.fer, errors.size)
        return good, False
    if len(good) < width:
        raise ConstructionError(f"FER target leaves {len(good)} positions, fewer than the {width}-bit CRC")
    return good, True


def construct_fp(tree: ReliabilityTree, target: DesignTarget, crc: CrcConfig | None = None) -> CodeSpec:
    """Fully polarized code: Γ from the leaf EPs, all-zero map."""
    good, met = _good_set_for(tree.leaf_errors(), tree.key[tree.n], target, crc)
    logger.debug("FP construction: n=%d, |Γ|=%d", tree.n, len(good))
    return CodeSpec(n=tree.n, good_set=good, relaxation=RelaxationMap.zeros(tree.n), crc=crc, target_met=met)


def inherited_leaf_figures(
    tree: ReliabilityTree, relaxation: RelaxationMap
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Leaf EPs and sort keys after relaxation: a relaxed subtree carries its root's e_upper down."""
    if relaxation.n != tree.n:
        raise ConstructionError(f"map depth {relaxation.n} does not match tree depth {tree.n}")
    errors = tree.e_upper[0]
    key = tree.key[0]
    for t in range(1, tree.n + 1):
        inherited = np.repeat(relaxation.levels[t - 1], 2)
        errors = np.where(inherited, np.repeat(errors, 2), tree.e_upper[t])
        key = np.where(inherited, np.repeat(key, 2), tree.key[t])
    return errors, key


def construct_relaxed(
    tree: ReliabilityTree,
    scenario: Scenario,
    thresholds: Thresholds,
    target: DesignTarget,
    crc: CrcConfig | None = None,
) -> CodeSpec:
    """Top-down relaxation sweep followed by good-set selection on the inherited leaf EPs.

    A node below a relaxed parent is relaxed too.  Otherwise it is relaxed
    when its EP is below eg (GC, AC), or when it is within eb_gap of 1/2
    and even its most upgraded descendant stays above eg (BC, AC).
    """
    scenario = Scenario(scenario)
    if not (scenario.relaxes_good or scenario.relaxes_bad):
        raise ConstructionError(f"construct_relaxed handles gc, bc and ac, not {scenario.value}")
    if thresholds.eg >= thresholds.eb:
        raise ConstructionError(f"inconsistent thresholds: eg={thresholds.eg!r} >= eb={thresholds.eb!r}")

    levels = [np.zeros(1, dtype=bool)]
    for t in range(1, tree.n + 1):
        relaxed = np.repeat(levels[-1], 2)
        trigger = np.zeros(2**t, dtype=bool)
        if scenario.relaxes_good:
            trigger |= tree.e_upper[t] < thresholds.eg
        if scenario.relaxes_bad:
            trigger |= (tree.bad_gap(t) < thresholds.eb_gap) & tree.best_descendant_exceeds(t, thresholds.eg)
        levels.append(relaxed | trigger)
        logger.debug("level %d: %d relaxed nodes (%d new)", t, int(levels[-1].sum()), int((trigger & ~relaxed).sum()))
    relaxation = RelaxationMap(tuple(levels))

    errors, key = inherited_leaf_figures(tree, relaxation)
    good, met = _good_set_for(errors, key, target, crc)
    return CodeSpec(
        n=tree.n, good_set=good, relaxation=relaxation, crc=crc, label=scenario.value, target_met=met
    )


def construct_mrp(fp: CodeSpec, tree: ReliabilityTree | None = None, mode: Scenario = Scenario.AC_MRP) -> CodeSpec:
    """Relax the rate-1 (and for AC-MRP the rate-0) subtrees of `fp`; Γ stays fixed."""
    mode = Scenario(mode)
    if mode not in (Scenario.GC_MRP, Scenario.AC_MRP):
        raise ConstructionError(f"MRP mode must be gc-mrp or ac-mrp, not {mode.value}")
    if tree is not None and tree.n != fp.n:
        raise ConstructionError(f"tree depth {tree.n} does not match n={fp.n}")
    relaxation = subtree_rate_labels(fp.info_mask, rate_one=True, rate_zero=mode is Scenario.AC_MRP)
    return fp.with_map(relaxation, mode.value)


@dataclass(frozen=True, slots=True)
class FerOrderingReport:
    """Summed EPs over the FP good set, before and after relaxation."""

    sum_fp: float
    sum_rp: float
    precondition: bool
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "sum_fp": self.sum_fp,
            "sum_rp": self.sum_rp,
            "precondition": self.precondition,
            "pass": self.passed,
        }


def fer_ordering_check(
    tree: ReliabilityTree,
    fp: CodeSpec,
    relaxation: RelaxationMap,
    rtol: float = 1e-12,
) -> FerOrderingReport:
    """Compare sum of EPs over Γ_FP with and without the relaxation.

    The ordering is guaranteed when every relaxed subtree lies entirely
    inside Γ or entirely in the frozen set; that condition is reported as
    `precondition`.
    """
    rp_errors, _ = inherited_leaf_figures(tree, relaxation)
    positions = fp.info_positions
    sum_fp = float(tree.leaf_errors()[positions].sum())
    sum_rp = float(rp_errors[positions].sum())
    precondition = True
    mask = fp.info_mask
    for t, i in relaxation.maximal_roots():
        size = 2 ** (tree.n - t)
        block = mask[(i - 1) * size : i * size]
        if block.any() and not block.all():
            precondition = False
            break
    passed = sum_rp <= sum_fp * (1.0 + rtol) + 1e-300
    return FerOrderingReport(sum_fp=sum_fp, sum_rp=sum_rp, precondition=precondition, passed=passed)


def reliability_tree_for(
    channel: Channel,
    n: int,
    *,
    method: str = "auto",
    trials: int = 10_000,
    seed: int | None = None,
    max_workers: int = 1,
) -> ReliabilityTree:
    """Exact tree on the BEC, Gaussian approximation on AWGN, Monte-Carlo genie otherwise or on request."""
    if method == "auto":
        if isinstance(channel, BecChannel):
            method = "exact"
        elif isinstance(channel, AwgnChannel):
            method = "ga"
        else:
            method = "mc"
    if method == "exact":
        if not isinstance(channel, BecChannel):
            raise ConstructionError("exact reliability trees exist only for the BEC")
        return bec_z_tree(channel.p, n)
    if method == "ga":
        if not isinstance(channel, AwgnChannel):
            raise ConstructionError("Gaussian approximation applies only to AWGN")
        return ga_reliability_tree(channel.sigma, n)
    if method == "mc":
        if seed is None:
            raise ConstructionError("Monte-Carlo reliability estimation needs a seed")
        return mc_genie_bit_error(channel, n, trials, seed, max_workers=max_workers).to_tree()
    raise ConstructionError(f"unknown reliability method {method!r}")


@dataclass(frozen=True, slots=True, eq=False)
class CodeDesign:
    """A scenario code together with its FP reference and the thresholds used."""

    scenario: Scenario
    fp: CodeSpec
    code: CodeSpec
    thresholds: Thresholds
    tree: ReliabilityTree

    @property
    def rate_loss(self) -> float:
        return self.fp.rate - self.code.rate


def design_code(
    channel: Channel,
    n: int,
    target: DesignTarget,
    scenario: Scenario | str = Scenario.FP,
    *,
    crc: CrcConfig | None = None,
    tree: ReliabilityTree | None = None,
    reliability: str = "auto",
    trials: int = 10_000,
    seed: int | None = None,
    max_workers: int = 1,
) -> CodeDesign:
    """Build the FP reference and the requested scenario code on one reliability tree.

    FER targets on the BEC use eg = E/N; on other channels the FP rate sets
    eg = E/(R N).  Rate targets take E as the FP good set's summed EP, so
    eg = E/|Γ|.
    """
    scenario = Scenario(scenario)
    if tree is None:
        tree = reliability_tree_for(
            channel, n, method=reliability, trials=trials, seed=seed, max_workers=max_workers
        )
    elif tree.n != n:
        raise ConstructionError(f"tree depth {tree.n} does not match n={n}")
    bec = isinstance(channel, BecChannel)
    fp = construct_fp(tree, target, crc)

    if target.fer is not None:
        rate = 1.0 if bec else max(fp.k, 1) / fp.length
        thresholds = thresholds_from_target(target.fer, rate, fp.length, bec=bec)
    else:
        total = float(tree.leaf_errors()[fp.info_positions].sum())
        thresholds = _thresholds_for(total / max(fp.k, 1), bec=bec)
    logger.info(
        "Designing %s code: %s, n=%d, eg=%.4g, eb_gap=%.4g", scenario.value, channel.label, n,
        thresholds.eg, thresholds.eb_gap,
    )

    if scenario is Scenario.FP:
        code = fp
    elif scenario in (Scenario.GC_MRP, Scenario.AC_MRP):
        code = construct_mrp(fp, tree, scenario)
    else:
        code = construct_relaxed(tree, scenario, thresholds, target, crc)
    return CodeDesign(scenario=scenario, fp=fp, code=code, thresholds=thresholds, tree=tree)
