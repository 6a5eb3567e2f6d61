"""Tests for trial records and their CSV/JSON files."""

from __future__ import annotations

import json

import pytest

from relaxpolar.sim.records import (
    BOUNDS_SCHEMA,
    TRIAL_FIELDS,
    TRIALS_SCHEMA,
    TrialRecord,
    read_rows,
    write_bound_rows,
    write_trial_records,
)


class TestTrialRecord:
    def test_rates(self):
        record = TrialRecord(point=0.4, trials=200, frame_errors=10, bit_errors=30, info_bits_total=3200)
        assert record.fer == pytest.approx(0.05)
        assert record.ber == pytest.approx(30 / 3200)
        assert record.fer_standard_error() == pytest.approx((0.05 * 0.95 / 200) ** 0.5)

    def test_empty(self):
        record = TrialRecord(point=1.0, trials=0, frame_errors=0, bit_errors=0, info_bits_total=0)
        assert record.fer == 0.0
        assert record.ber == 0.0
        assert record.fer_standard_error() == 0.0

    def test_to_dict_has_every_column(self):
        record = TrialRecord(point=2.0, trials=5, frame_errors=1, bit_errors=2, info_bits_total=40)
        assert tuple(record.to_dict()) == TRIAL_FIELDS


class TestFiles:
    def test_trial_csv_and_mirror(self, tmp_path):
        records = [
            TrialRecord(point=0.3, trials=100, frame_errors=0, bit_errors=0, info_bits_total=1600),
            TrialRecord(point=0.4, trials=50, frame_errors=5, bit_errors=9, info_bits_total=800, early_stopped=True),
        ]
        path = tmp_path / "out" / "fer_fp_sc.csv"
        mirror = write_trial_records(path, records)

        assert path.read_text().splitlines()[0] == f"# {TRIALS_SCHEMA}"
        rows = read_rows(path)
        assert [row["point"] for row in rows] == ["0.3", "0.4"]
        assert rows[1]["early_stopped"] == "True"

        data = json.loads(mirror.read_text())
        assert data["schema"] == TRIALS_SCHEMA
        assert data["rows"][1]["fer"] == pytest.approx(0.1)

    def test_bound_rows(self, tmp_path):
        path = tmp_path / "bounds.csv"
        write_bound_rows(path, [{"p": 0.3, "gc_ub": 0.5}, {"p": 0.5, "gc_ub": 0.4}])
        assert path.read_text().startswith(f"# {BOUNDS_SCHEMA}\np,gc_ub\n")
        assert read_rows(path)[1] == {"p": "0.5", "gc_ub": "0.4"}
