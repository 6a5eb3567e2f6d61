"""Reliability trees: per-node Bhattacharyya values and error-probability estimates."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import special

from relaxpolar.exceptions import ReliabilityError

logger = logging.getLogger("relaxpolar.trees")

__all__ = [
    "NodeReliability",
    "ReliabilityKind",
    "ReliabilityTree",
    "bec_z_tree",
    "ga_phi_log",
    "ga_phi_inverse_log",
    "ga_reliability_tree",
]

Levels = tuple[NDArray[np.float64], ...]

_LN2 = math.log(2.0)
_BISECTION_STEPS = 100


class ReliabilityKind(str, enum.Enum):
    BEC_EXACT = "bec_exact"
    GA_AWGN = "ga_awgn"
    MC_GENIE = "mc_genie"


@dataclass(frozen=True, slots=True)
class NodeReliability:
    z: float
    e_lower: float
    e_upper: float


@dataclass(frozen=True, slots=True, eq=False)
class ReliabilityTree:
    """Per-node reliability figures for levels 0..n.

    `key` is a per-node sort key, ascending = more reliable, strictly
    monotone in the node's error estimate (log Z for the BEC, minus the
    mean LLR for GA, the EP estimate for Monte Carlo).  `zc` (BEC only)
    holds 1 - Z computed by its own recursion, `mean` (GA only) the mean
    LLR per node.
    """

    kind: ReliabilityKind
    z: Levels
    e_lower: Levels
    e_upper: Levels
    key: Levels
    zc: Levels | None = None
    mean: Levels | None = None

    def __post_init__(self) -> None:
        depth = len(self.z)
        for name in ("e_lower", "e_upper", "key"):
            if len(getattr(self, name)) != depth:
                raise ReliabilityError(f"{name} has {len(getattr(self, name))} levels, expected {depth}")
        for t, level in enumerate(self.z):
            if level.size != 2**t:
                raise ReliabilityError(f"level {t} has {level.size} nodes, expected {2**t}")

    @property
    def n(self) -> int:
        return len(self.z) - 1

    @property
    def length(self) -> int:
        return 2**self.n

    def node(self, t: int, i: int) -> NodeReliability:
        """Figures of node (t, i), i 1-based."""
        return NodeReliability(
            z=float(self.z[t][i - 1]),
            e_lower=float(self.e_lower[t][i - 1]),
            e_upper=float(self.e_upper[t][i - 1]),
        )

    def leaf_errors(self) -> NDArray[np.float64]:
        return self.e_upper[self.n]

    def bad_gap(self, t: int) -> NDArray[np.float64]:
        """1/2 - e_lower at level t, computed without cancellation where possible."""
        if self.kind is ReliabilityKind.BEC_EXACT and self.zc is not None:
            return 0.5 * self.zc[t]
        if self.kind is ReliabilityKind.GA_AWGN and self.mean is not None:
            return 0.5 * special.erf(np.sqrt(self.mean[t]) / 2.0)
        return 0.5 - self.e_lower[t]

    def best_descendant_exceeds(self, t: int, eg: float) -> NDArray[np.bool_]:
        """True where the all-plus descendant at level n still has EP above eg."""
        steps = 2.0 ** (self.n - t)
        if self.kind is ReliabilityKind.BEC_EXACT:
            log_z = self.key[t]
            if self.zc is not None:
                zc = np.clip(self.zc[t], 0.0, 1.0)
                with np.errstate(divide="ignore"):
                    log_z = np.where(zc < 0.5, np.log1p(-zc), log_z)
            return steps * log_z > math.log(2.0 * eg)
        if self.kind is ReliabilityKind.GA_AWGN and self.mean is not None:
            ceiling = 4.0 * float(special.erfcinv(2.0 * eg)) ** 2
            return self.mean[t] * steps < ceiling
        with np.errstate(divide="ignore", over="ignore"):
            zd = np.exp(steps * np.log(self.z[t]))
        lower = zd * zd / (2.0 * (1.0 + np.sqrt(1.0 - zd * zd)))
        return lower > eg


def bec_z_tree(p: float, n: int) -> ReliabilityTree:
    """Exact Bhattacharyya tree of BEC(p); children of z are (2z - z^2, z^2).

    The complement c = 1 - z is carried by its own recursion
    (c- = c^2, c+ = c(1 + z)) and log z by lz- = lz + log1p(c), lz+ = 2 lz.
    Rounding never takes z or c above 1.
    """
    if not 0.0 <= p <= 1.0:
        raise ReliabilityError(f"erasure probability must be in [0, 1], got {p!r}")
    if n < 0:
        raise ReliabilityError(f"depth must be non-negative, got {n}")
    z_levels = [np.array([p])]
    c_levels = [np.array([1.0 - p])]
    with np.errstate(divide="ignore"):
        lz_levels = [np.log(z_levels[0])]
    for _ in range(n):
        z, c, lz = z_levels[-1], c_levels[-1], lz_levels[-1]
        z_new = np.empty(2 * z.size)
        c_new = np.empty(2 * z.size)
        lz_new = np.empty(2 * z.size)
        z_new[0::2] = np.minimum(z * (1.0 + c), 1.0)
        z_new[1::2] = z * z
        c_new[0::2] = c * c
        c_new[1::2] = np.minimum(c * (1.0 + z), 1.0)
        lz_new[0::2] = lz + np.log1p(c)
        lz_new[1::2] = 2.0 * lz
        z_levels.append(z_new)
        c_levels.append(c_new)
        lz_levels.append(lz_new)
    errors = tuple(z / 2.0 for z in z_levels)
    return ReliabilityTree(
        kind=ReliabilityKind.BEC_EXACT,
        z=tuple(z_levels),
        e_lower=errors,
        e_upper=errors,
        key=tuple(lz_levels),
        zc=tuple(c_levels),
    )


def ga_phi_log(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """log phi(x) for the usual two-piece approximation, with phi(0) = 1 and phi <= 1."""
    x = np.asarray(x, dtype=np.float64)
    safe = np.maximum(x, 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = -0.4527 * safe**0.86 + 0.0218
        large = 0.5 * np.log(np.pi / safe) - safe / 4.0 + np.log1p(-10.0 / (7.0 * np.maximum(safe, 10.0)))
    value = np.where(x < 10.0, small, large)
    return np.where(x <= 0.0, 0.0, np.minimum(value, 0.0))


def ga_phi_inverse_log(target: NDArray[np.float64], upper: NDArray[np.float64]) -> NDArray[np.float64]:
    """Solve log phi(x) = target on [0, upper] by bisection."""
    lo = np.zeros_like(upper)
    hi = np.array(upper, dtype=np.float64)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = ga_phi_log(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def _ga_minus(mean: NDArray[np.float64]) -> NDArray[np.float64]:
    """m- = phi^-1(1 - (1 - phi(m))^2), evaluated in the log domain."""
    log_phi = ga_phi_log(mean)
    one_minus = -np.expm1(log_phi)
    with np.errstate(divide="ignore"):
        target = np.where(log_phi < -30.0, _LN2 + log_phi, np.log1p(-(one_minus**2)))
    return ga_phi_inverse_log(target, mean)


def ga_reliability_tree(sigma: float, n: int) -> ReliabilityTree:
    """Gaussian-approximation tree for BPSK/AWGN with root mean LLR 2/sigma^2."""
    if not sigma > 0.0:
        raise ReliabilityError(f"sigma must be positive, got {sigma!r}")
    with np.errstate(over="ignore", divide="ignore"):
        root = 2.0 / np.array([sigma], dtype=np.float64) ** 2
    if not np.all(np.isfinite(root)):
        raise ReliabilityError("Gaussian approximation failed at node (0, 1): non-finite mean LLR")
    means = [root]
    for t in range(n):
        parent = means[-1]
        child = np.empty(2 * parent.size)
        with np.errstate(over="ignore"):
            child[0::2] = _ga_minus(parent)
            child[1::2] = 2.0 * parent
        bad = ~np.isfinite(child) | (child < 0.0)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            raise ReliabilityError(
                f"Gaussian approximation failed at node ({t + 1}, {j + 1}): mean LLR {child[j]!r}"
            )
        means.append(child)
        logger.debug("GA level %d: mean LLR range [%.4g, %.4g]", t + 1, child.min(), child.max())
    errors = tuple(0.5 * special.erfc(np.sqrt(m) / 2.0) for m in means)
    return ReliabilityTree(
        kind=ReliabilityKind.GA_AWGN,
        z=tuple(np.exp(-m / 4.0) for m in means),
        e_lower=errors,
        e_upper=errors,
        key=tuple(-m for m in means),
        mean=tuple(means),
    )
