"""Tests for complexity, latency and the finite/asymptotic bounds."""

from __future__ import annotations

import numpy as np
import pytest

from relaxpolar.bounds import (
    LatencyMode,
    ac_bounds,
    asymptotic_bounds,
    bc_bounds,
    decoding_cr,
    duality_check,
    evaluate_bounds,
    gc_bounds,
    latency_cycles,
    latency_reduction,
    measured_cr,
    rate_loss,
    skipped_ops,
)
from relaxpolar.channels import BecChannel
from relaxpolar.exceptions import ConstructionError, DomainError
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.polarization.construct import (
    DesignTarget,
    Scenario,
    construct_mrp,
    design_code,
    thresholds_from_target,
)
from relaxpolar.polarization.maps import RelaxationMap


def _half_relaxed() -> RelaxationMap:
    return RelaxationMap((np.zeros(1, bool), np.array([False, True]), np.array([False, False, True, True])))


class TestMeasuredCr:
    def test_single_node(self):
        relaxation = _half_relaxed()
        assert skipped_ops(relaxation) == 2
        assert measured_cr(relaxation) == pytest.approx(0.25)

    def test_extremes(self):
        assert measured_cr(RelaxationMap.zeros(5)) == 0.0
        assert measured_cr(RelaxationMap.full(5)) == pytest.approx(1.0)
        assert measured_cr(RelaxationMap.zeros(0)) == 0.0


class TestDecodingCr:
    def test_modes(self):
        code = CodeSpec(n=2, good_set=(3, 4), relaxation=_half_relaxed())
        assert decoding_cr(code, LatencyMode.SC_FP) == 0.0
        assert decoding_cr(code, "rscd") == pytest.approx(0.25)
        assert decoding_cr(code, LatencyMode.SSCD_FP) == pytest.approx(0.5)
        assert decoding_cr(code, LatencyMode.SSCD_FP, rate_zero=False) == pytest.approx(0.25)
        assert decoding_cr(code, LatencyMode.SSCD_RP) == pytest.approx(0.5)


class TestLatency:
    def test_fully_polarized(self):
        code = CodeSpec(n=2, good_set=(3, 4), relaxation=RelaxationMap.zeros(2))
        assert latency_cycles(code, LatencyMode.SC_FP) == 9
        assert latency_reduction(code, LatencyMode.SC_FP) == 0.0

    def test_relaxed_and_simplified(self):
        code = CodeSpec(n=2, good_set=(3, 4), relaxation=_half_relaxed())
        assert latency_cycles(code, LatencyMode.RSCD) == 7
        assert latency_cycles(code, LatencyMode.SSCD_FP) == 5
        assert latency_reduction(code, LatencyMode.SSCD_FP) == pytest.approx(1.0 - 5 / 9)

    def test_frozen_relaxed_subtree_is_free(self):
        relaxation = RelaxationMap((np.zeros(1, bool), np.array([True, False]), np.array([True, True, False, False])))
        code = CodeSpec(n=2, good_set=(3, 4), relaxation=relaxation)
        assert latency_cycles(code, LatencyMode.RSCD) == 6

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_baseline_is_3n_minus_3(self, n):
        code = CodeSpec(n=n, good_set=tuple(range(2**n // 2 + 1, 2**n + 1)), relaxation=RelaxationMap.zeros(n))
        assert latency_cycles(code, "sc_fp") == 3 * 2**n - 3


class TestFiniteBounds:
    def test_good_side_upper_bound(self):
        bounds = gc_bounds(0.5, 20, 1e-6, 0.75)
        assert bounds.t_first == 5
        assert bounds.ub == pytest.approx(0.75)
        assert not bounds.ub_clamped

    def test_clamped_upper_bound(self):
        bounds = gc_bounds(0.5, 4, 1e-6, 0.75)
        assert bounds.ub == 0.0
        assert bounds.ub_clamped

    def test_sides_mirror_at_half(self):
        gc = gc_bounds(0.5, 10, 1e-5, 0.75)
        bc = bc_bounds(0.5, 10, 1e-5, 0.75)
        assert gc.ub == pytest.approx(bc.ub)
        assert gc.lb1 == pytest.approx(bc.lb1)

    def test_ac_combines(self):
        gc = gc_bounds(0.3, 10, 1e-5, 0.51)
        bc = bc_bounds(0.3, 10, 1e-5, 0.91)
        ac = ac_bounds(gc, bc, 0.3)
        assert ac.ub == gc.ub
        assert ac.lb == pytest.approx(gc.lb1 + bc.lb1)
        assert ac_bounds(gc, bc, 0.7).ub == bc.ub

    def test_domain(self):
        with pytest.raises(DomainError, match="erasure probability"):
            gc_bounds(0.0, 8, 1e-5, 0.5)
        with pytest.raises(DomainError, match="threshold"):
            gc_bounds(0.5, 8, 1.5, 0.5)


class TestAsymptoticBounds:
    def test_values(self):
        bounds = asymptotic_bounds(0.5, 0.25, 1024, 0.5, 0.01)
        assert bounds.gc == pytest.approx(0.49 * 0.375)
        assert bounds.bc == pytest.approx(0.49 * (1.0 - 2.5 * 10 / 1024))
        assert bounds.combined == pytest.approx(0.75)

    @pytest.mark.parametrize(
        "beta,delta,epsilon,match",
        [(0.6, 0.1, 0.01, "beta"), (0.25, 3.0, 0.01, "delta"), (0.25, 0.5, 0.0, "epsilon")],
    )
    def test_domain_errors(self, beta, delta, epsilon, match):
        with pytest.raises(DomainError, match=match):
            asymptotic_bounds(0.5, beta, 1024, delta, epsilon)


class TestRateLoss:
    def test_difference(self):
        fp = CodeSpec(n=2, good_set=(3, 4), relaxation=RelaxationMap.zeros(2))
        rp = CodeSpec(n=2, good_set=(4,), relaxation=RelaxationMap.zeros(2))
        assert rate_loss(fp, rp) == pytest.approx(0.25)

    def test_length_mismatch(self):
        fp = CodeSpec(n=2, good_set=(4,), relaxation=RelaxationMap.zeros(2))
        rp = CodeSpec(n=3, good_set=(8,), relaxation=RelaxationMap.zeros(3))
        with pytest.raises(ConstructionError, match="cannot compare"):
            rate_loss(fp, rp)


class TestDuality:
    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.8])
    def test_mirror(self, p):
        report = duality_check(p, 10, 2e-5 / 1024)
        assert report.passed
        assert report.to_dict()["pass"] is True


class TestEvaluateBounds:
    @pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("n", [6, 8])
    def test_sandwich_holds(self, p, n):
        report = evaluate_bounds(p, n, 1e-3)
        first_bounds = [v for v in report.violations if v.split(":")[0] in ("gc", "bc", "ac")]
        assert first_bounds == []
        assert report.measured_ac >= max(report.measured_gc, report.measured_bc) - 1e-12

    def test_row_and_latency(self):
        report = evaluate_bounds(0.5, 8, 1e-3, beta=0.25, delta=0.5, epsilon=0.01)
        row = report.to_row()
        assert row["p"] == 0.5
        assert report.asymptotic is not None
        latency = report.latency
        assert latency["sc_fp"] == 3 * 256 - 3
        assert latency["sscd_rp"] <= latency["sscd_fp"] <= latency["sc_fp"]


class TestBecSweep:
    """n = 20 BEC codes designed for FER 1e-5, Z threshold 2E/N."""

    def test_upper_bound_at_grid_edges(self):
        tg = thresholds_from_target(1e-5, 1.0, 2**20).tg
        assert tg == pytest.approx(2e-5 / 2**20)
        gc = gc_bounds(0.05, 20, tg, 2 * 0.05 - 0.05**2)
        bc = bc_bounds(0.95, 20, tg, 1.0 - 0.95**2)
        assert (gc.t_first, bc.t_first) == (4, 4)
        assert ac_bounds(gc, bc, 0.95).ub == pytest.approx(0.8)
        assert gc_bounds(0.04, 20, tg, 2 * 0.04 - 0.04**2).ub == pytest.approx(0.85)

    @pytest.mark.slow
    def test_ac_curve(self):
        target = DesignTarget(fer=1e-5)
        curve = {}
        for p in (0.001, 0.05, 0.1, 0.5, 0.9, 0.95):
            design = design_code(BecChannel(p), 20, target, Scenario.AC)
            curve[p] = measured_cr(design.code.relaxation)
            assert design.rate_loss < 1e-4
        assert curve[0.05] == pytest.approx(0.549, abs=2e-3)
        assert curve[0.1] == pytest.approx(0.500, abs=2e-3)
        assert curve[0.5] == pytest.approx(0.361, abs=2e-3)
        assert curve[0.001] == pytest.approx(0.753, abs=2e-3)
        assert abs(curve[0.05] - curve[0.95]) <= 1e-12
        assert abs(curve[0.1] - curve[0.9]) <= 1e-12
        assert min(curve.values()) == curve[0.5]


class TestRateThreeTenthsCode:
    """N = 2^16 on BEC(2/3), rate 0.3 = 0.9 capacity."""

    @pytest.fixture(scope="class")
    def design(self):
        return design_code(BecChannel(2.0 / 3.0), 16, DesignTarget(rate=0.3), Scenario.AC)

    def test_decoding_complexity(self, design):
        assert decoding_cr(design.code, LatencyMode.RSCD) == pytest.approx(0.450, abs=0.01)
        assert decoding_cr(design.code, LatencyMode.SSCD_RP) == pytest.approx(0.509, abs=0.02)

    def test_mrp_latency(self, design):
        mrp = construct_mrp(design.fp, design.tree, Scenario.AC_MRP)
        assert latency_reduction(mrp, LatencyMode.RSCD) == pytest.approx(0.935, abs=0.02)
        assert latency_cycles(mrp, LatencyMode.SSCD_RP) == latency_cycles(mrp, LatencyMode.RSCD)
