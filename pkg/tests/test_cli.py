"""Tests for CLI commands."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import pytest

from relaxpolar.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_VERIFY,
    _overrides,
    cmd_check,
    cmd_init,
    main,
)
from relaxpolar.exceptions import ResourceLimitError, VerificationError
from relaxpolar.sim.config_loader import load_config


class TestCmdCheck:
    def test_valid_config(self, sample_config_path: Path, capsys):
        class Args:
            config = str(sample_config_path)

        result = cmd_check(Args())
        assert result == EXIT_OK
        captured = capsys.readouterr()
        assert "Config OK" in captured.out
        assert "bec p=0.4" in captured.out

    def test_invalid_config(self, tmp_path: Path, capsys):
        bad = tmp_path / "relaxpolar.toml"
        bad.write_text("not valid {{")

        class Args:
            config = str(bad)

        result = cmd_check(Args())
        assert result == EXIT_ERROR
        captured = capsys.readouterr()
        assert "ERROR" in captured.err


class TestCmdInit:
    def test_creates_loadable_file(self, tmp_path: Path):
        out_path = tmp_path / "relaxpolar.toml"

        class Args:
            output = str(out_path)
            force = False

        assert cmd_init(Args()) == EXIT_OK
        config = load_config(out_path)
        assert config.code.scenario == "ac"
        assert config.sim.seed == 1

    def test_refuses_overwrite_without_force(self, tmp_path: Path, capsys):
        out_path = tmp_path / "relaxpolar.toml"
        out_path.write_text("existing")

        class Args:
            output = str(out_path)
            force = False

        assert cmd_init(Args()) == EXIT_ERROR
        assert "already exists" in capsys.readouterr().err
        assert out_path.read_text() == "existing"

    def test_overwrites_with_force(self, tmp_path: Path):
        out_path = tmp_path / "relaxpolar.toml"
        out_path.write_text("existing")

        class Args:
            output = str(out_path)
            force = True

        assert cmd_init(Args()) == EXIT_OK
        assert "version = 1" in out_path.read_text()


class TestOverrides:
    def test_only_given_flags(self):
        args = argparse.Namespace(p=0.3, n=None, crc=False, min_sum=False, trials=50)
        assert _overrides(args) == {"channel": {"p": 0.3}, "sim": {"trials": 50}}

    def test_channel_kind_clears_parameters(self):
        args = argparse.Namespace(channel="awgn", snr=2.0)
        assert _overrides(args) == {"channel": {"kind": "awgn", "snr_db": 2.0, "p": None, "capacity": None}}

    def test_crc_flag(self):
        assert _overrides(argparse.Namespace(crc=True)) == {"code": {"crc": True}}


class TestMain:
    def test_no_subcommand(self, capsys):
        assert main([]) == EXIT_ERROR
        assert "usage" in capsys.readouterr().out

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "relaxpolar 0.1.0" in capsys.readouterr().out

    def test_construct(self, sample_config_path: Path, tmp_path: Path, capsys):
        out = tmp_path / "out"
        result = main(["construct", "-c", str(sample_config_path), "--out", str(out)])
        assert result == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["scenario"] == "ac"
        assert (out / "ac_code.json").exists()
        assert (out / "ac_map.json").exists()

    def test_construct_flag_overrides(self, sample_config_path: Path, tmp_path: Path, capsys):
        out = tmp_path / "out"
        argv = ["construct", "-c", str(sample_config_path), "--out", str(out), "--scenario", "gc-mrp", "--n", "4"]
        assert main(argv) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["scenario"] == "gc-mrp"
        assert summary["n"] == 4

    def test_fer(self, sample_config_path: Path, tmp_path: Path, capsys):
        out = tmp_path / "out"
        argv = ["fer", "-c", str(sample_config_path), "--out", str(out), "--points", "0.0", "--trials", "32"]
        assert main(argv) == EXIT_OK
        assert "FER=0.0000e+00" in capsys.readouterr().out
        assert (out / "fer_ac_sc.csv").exists()

    def test_fer_with_saved_code(self, sample_config_path: Path, tmp_path: Path):
        out = tmp_path / "out"
        assert main(["construct", "-c", str(sample_config_path), "--out", str(out), "--scenario", "fp"]) == EXIT_OK
        argv = ["fer", "-c", str(sample_config_path), "--out", str(out), "--code", str(out / "fp_code.json")]
        assert main([*argv, "--points", "0.0", "--trials", "16"]) == EXIT_OK
        assert (out / "fer_fp_sc.csv").exists()

    def test_bounds(self, sample_config_path: Path, tmp_path: Path):
        out = tmp_path / "out"
        result = main(["bounds", "-c", str(sample_config_path), "--out", str(out), "--p-grid", "0.4", "0.6"])
        assert result in (EXIT_OK, EXIT_VERIFY)
        assert (out / "bounds.csv").exists()

    def test_verify(self, sample_config_path: Path, tmp_path: Path, capsys):
        out = tmp_path / "out"
        assert main(["verify", "duality", "-c", str(sample_config_path), "--out", str(out)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["suite"] == "duality"
        assert report["pass"] is True
        assert (out / "verify_duality.json").exists()

    def test_missing_config_file(self, tmp_path: Path, capsys):
        assert main(["construct", "-c", str(tmp_path / "missing.toml")]) == EXIT_ERROR
        assert "Config file not found" in capsys.readouterr().err

    @pytest.mark.parametrize("error,code", [(ResourceLimitError, EXIT_RESOURCE), (VerificationError, EXIT_VERIFY)])
    def test_error_exit_codes(self, sample_config_path: Path, tmp_path: Path, monkeypatch, error, code):
        def boom(config, out_dir):
            raise error("too big")

        monkeypatch.setattr("relaxpolar.cli.run_construct", boom)
        assert main(["construct", "-c", str(sample_config_path), "--out", str(tmp_path)]) == code
