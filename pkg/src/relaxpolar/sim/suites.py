"""Verification suites run by `relaxpolar verify`.

Each suite returns a list of CheckResult; a suite passes when every check
does. Suites are deterministic given the seed.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from relaxpolar.bounds import duality_check, skipped_ops
from relaxpolar.channels import AwgnChannel, BecChannel, DiscreteBms, bec_as_dmc, bsc, random_symmetric_channel
from relaxpolar.codec.decoders import SuccessiveCancellationDecoder
from relaxpolar.codec.encoder import encode, generator_matrix, kron_generator
from relaxpolar.exceptions import ConfigurationError, VerificationError
from relaxpolar.oracle import exact_bit_channel, recursion_report, verify_appendix_lemma
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.polarization.construct import (
    DesignTarget,
    Scenario,
    construct_fp,
    construct_mrp,
    construct_relaxed,
    fer_ordering_check,
    thresholds_from_target,
)
from relaxpolar.polarization.genie import mc_genie_bit_error
from relaxpolar.polarization.maps import RelaxationMap, random_relaxation_map
from relaxpolar.polarization.trees import bec_z_tree

logger = logging.getLogger("relaxpolar.suites")

# Magnitude of a noiseless channel LLR.
_CLEAN_LLR = 20.0


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass(slots=True)
class SuiteOptions:
    seed: int = 0
    genie_trials: int = 100_000
    genie_n: int = 8
    max_workers: int = 1


@dataclass(slots=True)
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "elapsed": self.elapsed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _grid(start: float, stop: float, count: int) -> list[float]:
    return [float(x) for x in np.linspace(start, stop, count)]


def _test_channels(seed: int) -> dict[str, list[DiscreteBms]]:
    rng = np.random.default_rng(seed)
    return {
        "bec": [bec_as_dmc(p) for p in _grid(0.05, 0.95, 19)],
        "bsc": [bsc(q) for q in _grid(0.01, 0.49, 13)],
        "random": [random_symmetric_channel(rng, pairs=2) for _ in range(200)],
    }


# -- appendix / recursion ----------------------------------------------------


def suite_appendix(options: SuiteOptions) -> list[CheckResult]:
    checks = []
    for family, channels in _test_channels(options.seed).items():
        reports = [verify_appendix_lemma(w) for w in channels]
        failed = [i for i, r in enumerate(reports) if not r.passed]
        checks.append(
            CheckResult(
                f"appendix:{family}",
                not failed,
                {
                    "channels": len(reports),
                    "failed": failed,
                    "max_minus_gap": max(abs(r.e_minus_exact - r.e_minus_formula) for r in reports),
                    "min_plus_margin": min(r.e_plus_exact - r.e_plus_lb for r in reports),
                },
            )
        )
    ref = verify_appendix_lemma(bsc(0.1))
    exact = abs(ref.e_minus_exact - 0.18) <= 1e-12 and abs(ref.e_plus_exact - 0.1) <= 1e-12
    checks.append(CheckResult("appendix:bsc0.1", exact and ref.passed, ref.to_dict()))
    return checks


def suite_recursion(options: SuiteOptions) -> list[CheckResult]:
    checks = []
    for family, channels in _test_channels(options.seed).items():
        reports = [recursion_report(w) for w in channels]
        minus_ok = [r.z_minus_tight if family == "bec" else r.z_minus_bounded for r in reports]
        flags = {
            "z_plus_exact": all(r.z_plus_exact for r in reports),
            "z_minus": all(minus_ok),
            "conserved": all(r.conserved for r in reports),
            "ordered": all(r.ordered for r in reports),
        }
        checks.append(CheckResult(f"recursion:{family}", all(flags.values()), {"channels": len(reports), **flags}))

    worst = 0.0
    for p in (0.3, 0.5):
        w = bec_as_dmc(p)
        for n in range(1, 5):
            tree = bec_z_tree(p, n)
            for i in range(1, 2**n + 1):
                z = exact_bit_channel(w, n, i).bhattacharyya()
                worst = max(worst, abs(z - float(tree.z[n][i - 1])))
    checks.append(CheckResult("recursion:bec-tree", worst <= 1e-12, {"max_gap": worst}))
    return checks


# -- duality / lemma ----------------------------------------------------------


def suite_duality(options: SuiteOptions, n: int = 12, fer_target: float = 1e-5) -> list[CheckResult]:
    threshold = 2.0 * fer_target / 2**n
    checks = []
    for p in _grid(0.1, 0.9, 9):
        report = duality_check(p, n, threshold)
        checks.append(CheckResult(f"duality:p={p:g}", report.passed, report.to_dict()))
    return checks


def suite_lemma(options: SuiteOptions) -> list[CheckResult]:
    """FER ordering with Γ held at the fully polarized good set.

    A setting whose relaxed subtrees straddle Γ does not meet the lemma's
    premise and only reports.
    """
    checks = []
    settings = [(p, rate) for p in (0.2, 0.35, 0.5, 0.65, 0.8) for rate in (0.25, 0.4, 0.5, 0.6)]
    for index, (p, rate) in enumerate(settings):
        n = 8 + index % 5
        tree = bec_z_tree(p, n)
        target = DesignTarget(rate=rate)
        fp = construct_fp(tree, target)
        thresholds = thresholds_from_target(1e-5, rate, 2**n)
        maps = {
            "gc": construct_relaxed(tree, Scenario.GC, thresholds, target).relaxation,
            "ac-mrp": construct_mrp(fp, tree, Scenario.AC_MRP).relaxation,
        }
        for label, relaxation in maps.items():
            report = fer_ordering_check(tree, fp, relaxation)
            checks.append(
                CheckResult(
                    f"lemma:p={p:g},R={rate:g},n={n},{label}",
                    report.passed or not report.precondition,
                    report.to_dict(),
                )
            )
    return checks


# -- codec ----------------------------------------------------------------------


def _all_words(length: int) -> np.ndarray:
    return ((np.arange(2**length)[:, None] >> np.arange(length)) & 1).astype(np.uint8)


def _round_trip(relaxation: RelaxationMap, u: np.ndarray) -> tuple[bool, bool]:
    """(decoded == u, op count == nN - skipped) for noiseless transmission of every row of u."""
    code = CodeSpec(n=relaxation.n, good_set=tuple(range(1, relaxation.length + 1)), relaxation=relaxation)
    llr = _CLEAN_LLR * (1.0 - 2.0 * encode(u, relaxation).astype(np.float64))
    batch = SuccessiveCancellationDecoder(code).decode_batch(llr)
    ops_expected = relaxation.n * relaxation.length - skipped_ops(relaxation)
    return bool(np.array_equal(batch.u_hat, u)), batch.ops == ops_expected


def suite_codec(options: SuiteOptions) -> list[CheckResult]:
    rng = np.random.default_rng(options.seed)
    checks = []
    kron_ok = all(np.array_equal(generator_matrix(RelaxationMap.zeros(n)), kron_generator(n)) for n in range(1, 5))
    checks.append(CheckResult("codec:kron", kron_ok, {"n_max": 4}))

    failures: list[str] = []
    ops_failures: list[str] = []
    for n in range(1, 5):
        words = _all_words(2**n)
        for m in range(4):
            relaxation = RelaxationMap.zeros(n) if m == 0 else random_relaxation_map(n, rng, density=0.3)
            decoded, ops = _round_trip(relaxation, words)
            if not decoded:
                failures.append(f"n={n} map#{m}")
            if not ops:
                ops_failures.append(f"n={n} map#{m}")
    checks.append(CheckResult("codec:exhaustive", not failures, {"failures": failures}))

    random_failures: list[str] = []
    pairs = 0
    for n in (5, 6):
        for m in range(50):
            relaxation = random_relaxation_map(n, rng, density=0.25)
            u = rng.integers(0, 2, size=(100, 2**n), dtype=np.uint8)
            decoded, ops = _round_trip(relaxation, u)
            pairs += u.shape[0]
            if not decoded:
                random_failures.append(f"n={n} random map#{m}")
            if not ops:
                ops_failures.append(f"n={n} random map#{m}")
    checks.append(CheckResult("codec:random", not random_failures, {"pairs": pairs, "failures": random_failures}))
    checks.append(CheckResult("codec:op-count", not ops_failures, {"failures": ops_failures}))
    return checks


def suite_sscd(options: SuiteOptions, instances: int = 1000) -> list[CheckResult]:
    """Shortcut decoding against plain relaxed SC on noisy AWGN frames."""
    rng = np.random.default_rng(options.seed)
    checks = []
    designs = [(n, p, rate) for n in (4, 6, 8) for p, rate in ((0.3, 0.5), (0.6, 0.3))]
    per_design = max(1, instances // (2 * len(designs)))
    for n, p, rate in designs:
        tree = bec_z_tree(p, n)
        fp = construct_fp(tree, DesignTarget(rate=rate))
        for code in (fp, construct_mrp(fp, tree, Scenario.AC_MRP)):
            channel = AwgnChannel.from_snr_db(float(rng.uniform(0.0, 4.0)))
            u = np.zeros((per_design, code.length), dtype=np.uint8)
            u[:, code.info_positions] = rng.integers(0, 2, size=(per_design, code.k), dtype=np.uint8)
            llr = channel.transmit_llr(encode(u, code.relaxation), rng)
            plain = SuccessiveCancellationDecoder(code).decode_batch(llr)
            short = SuccessiveCancellationDecoder(code, shortcuts=True).decode_batch(llr)
            mismatched = int(np.count_nonzero((plain.u_hat != short.u_hat).any(axis=1)))
            checks.append(
                CheckResult(
                    f"sscd:n={n},p={p:g},{code.label}",
                    mismatched == 0,
                    {"frames": per_design, "mismatched": mismatched},
                )
            )
    return checks


# -- genie -----------------------------------------------------------------------


def suite_genie(options: SuiteOptions, p: float = 0.4) -> list[CheckResult]:
    """Per-index genie error rates on BEC(p) against the exact z/2 within 4 standard errors."""
    n = options.genie_n
    trials = options.genie_trials
    estimate = mc_genie_bit_error(BecChannel(p), n, trials, options.seed, max_workers=options.max_workers)
    exact = bec_z_tree(p, n).z[n] / 2.0
    sigma = np.sqrt(exact * (1.0 - exact) / trials)
    deviation = np.abs(estimate.bit_error - exact)
    outside = np.flatnonzero(deviation > 4.0 * sigma + 1.0 / trials)
    return [
        CheckResult(
            f"genie:bec{p:g},n={n}",
            outside.size == 0,
            {
                "trials": estimate.trials,
                "outside": [int(i) + 1 for i in outside],
                "max_sigmas": float(np.max(deviation / np.maximum(sigma, 1.0 / trials))),
            },
        )
    ]


SUITES: dict[str, Callable[[SuiteOptions], list[CheckResult]]] = {
    "appendix": suite_appendix,
    "recursion": suite_recursion,
    "duality": suite_duality,
    "codec": suite_codec,
    "sscd": suite_sscd,
    "lemma": suite_lemma,
    "genie": suite_genie,
}


def run_suite(name: str, options: SuiteOptions | None = None, *, fail_fast: bool = False) -> SuiteReport:
    """Run one suite by name, or every suite for "all"."""
    options = options or SuiteOptions()
    if name != "all" and name not in SUITES:
        raise ConfigurationError(f"Unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    names = list(SUITES) if name == "all" else [name]
    report = SuiteReport(suite=name)
    started = time.perf_counter()
    for suite in names:
        logger.info("Running suite %s", suite)
        checks = SUITES[suite](options)
        report.checks.extend(checks)
        for check in checks:
            if not check.passed:
                logger.warning("Check failed: %s %s", check.name, check.detail)
                if fail_fast:
                    raise VerificationError(f"Check failed: {check.name}")
    report.elapsed = time.perf_counter() - started
    logger.info("Suite %s: %d checks, %d failed", name, len(report.checks), len(report.failures))
    return report
