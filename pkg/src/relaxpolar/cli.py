"""CLI entry point for relaxpolar."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable

from relaxpolar import __version__
from relaxpolar.exceptions import (
    ConfigurationError,
    RelaxPolarError,
    ResourceLimitError,
    VerificationError,
)
from relaxpolar.polarization.codespec import CodeSpec
from relaxpolar.sim.campaigns import run_bounds, run_construct, run_fer
from relaxpolar.sim.config_loader import CONFIG_NAME, find_config, load_config, merge_overrides
from relaxpolar.sim.config_models import SimConfig
from relaxpolar.sim.suites import SUITES, SuiteOptions, run_suite

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY = 2
EXIT_RESOURCE = 3

logger = logging.getLogger("relaxpolar.cli")


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s [%(levelname)8s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


# Flag name -> (section, key)
_FLAG_KEYS: dict[str, tuple[str, str]] = {
    "channel": ("channel", "kind"),
    "p": ("channel", "p"),
    "snr": ("channel", "snr_db"),
    "capacity": ("channel", "capacity"),
    "n": ("code", "n"),
    "rate": ("code", "rate"),
    "fer_target": ("code", "fer_target"),
    "scenario": ("code", "scenario"),
    "reliability": ("code", "reliability"),
    "decoder": ("decoder", "kind"),
    "list_size": ("decoder", "list_size"),
    "min_sum": ("decoder", "min_sum"),
    "trials": ("sim", "trials"),
    "seed": ("sim", "seed"),
    "early_stop_errors": ("sim", "early_stop_errors"),
    "points": ("sim", "points"),
    "workers": ("run", "max_workers"),
    "out": ("run", "out"),
    "p_grid": ("bounds", "p_grid"),
    "bounds_n": ("bounds", "n"),
    "bounds_fer_target": ("bounds", "fer_target"),
}


def _overrides(args: argparse.Namespace) -> dict[str, dict[str, Any]]:
    """Collect the flags that were actually given into per-section overrides."""
    sections: dict[str, dict[str, Any]] = {}
    for flag, (section, key) in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is None or value is False:
            continue
        sections.setdefault(section, {})[key] = value
    if getattr(args, "crc", False):
        sections.setdefault("code", {})["crc"] = True
    channel = sections.get("channel", {})
    if "kind" in channel:
        for key in ("p", "snr_db", "capacity"):
            channel.setdefault(key, None)
    return sections


def _load(args: argparse.Namespace) -> tuple[SimConfig, Path]:
    """Config from -c, else the nearest relaxpolar.toml, else defaults; then flag overrides."""
    if getattr(args, "config", None):
        config_path = Path(args.config)
        config = load_config(config_path)
        base = config_path.parent
    else:
        try:
            config_path = find_config()
            config = load_config(config_path)
            base = config_path.parent
        except ConfigurationError:
            config = SimConfig()
            base = Path.cwd()
    config = merge_overrides(config, _overrides(args))
    _setup_logging(config.run.log_level)
    return config, config.resolve_out(base)


def cmd_construct(args: argparse.Namespace) -> int:
    """Design a code and write its spec, map and summary."""
    config, out = _load(args)
    design, summary = run_construct(config, out)
    print(json.dumps(summary.to_dict(), indent=2))
    if not design.code.target_met:
        print(f"ERROR: design target not met for {design.code.label}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    """Sweep the BEC bounds grid and write bounds.csv."""
    config, out = _load(args)
    reports = run_bounds(config, out)
    violations = [f"p={r.p:g}: {v}" for r in reports for v in r.violations]
    for r in reports:
        print(f"p={r.p:<6g} CR gc={r.measured_gc:.4f} bc={r.measured_bc:.4f} ac={r.measured_ac:.4f}")
    if violations:
        for message in violations:
            print(f"VIOLATION: {message}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_fer(args: argparse.Namespace) -> int:
    """Monte-Carlo FER/BER sweep for a designed or saved code."""
    config, out = _load(args)
    code = CodeSpec.load(Path(args.code)) if getattr(args, "code", None) else None
    records = run_fer(config, out, code=code)
    for r in records:
        flag = " (early stop)" if r.early_stopped else ""
        print(f"{r.point:<8g} trials={r.trials:<8d} FER={r.fer:.4e} BER={r.ber:.4e}{flag}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run a verification suite and print its JSON report."""
    config, out = _load(args)
    options = SuiteOptions(
        seed=config.sim.seed if config.sim.seed is not None else 0,
        max_workers=config.run.max_workers,
    )
    if args.genie_trials is not None:
        options.genie_trials = args.genie_trials
    report = run_suite(args.suite, options)
    text = report.to_json()
    out.mkdir(parents=True, exist_ok=True)
    (out / f"verify_{args.suite}.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    if not report.passed:
        for check in report.failures:
            print(f"FAILED: {check.name}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    """Validate config and exit."""
    config_path = Path(args.config) if args.config else find_config()
    try:
        config = load_config(config_path)
    except ConfigurationError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_ERROR

    code = config.code
    target = f"rate={code.rate}" if code.rate is not None else f"fer_target={code.fer_target}"
    print(f"Config OK: {config_path}")
    print(f"  Version: {config.version}")
    print(f"  Channel: {config.channel.build().label}")
    print(f"  Code:    n={code.n} {target} scenario={code.scenario} crc={code.crc}")
    print(f"  Decoder: {config.decoder.kind}")
    print(f"  Sim:     trials={config.sim.trials} seed={config.sim.seed}")
    return EXIT_OK


def cmd_init(args: argparse.Namespace) -> int:
    """Generate a starter relaxpolar.toml."""
    output = Path(args.output) if args.output else Path(CONFIG_NAME)
    if output.exists() and not args.force:
        print(f"ERROR: {output} already exists. Use --force to overwrite.", file=sys.stderr)
        return EXIT_ERROR

    template = """\
version = 1

[run]
log_level = "INFO"
max_workers = 1
out = "results"

[channel]
kind = "bec"
p = 0.5

[code]
n = 10
rate = 0.5
scenario = "ac"
reliability = "auto"
crc = false

[decoder]
kind = "sc"
list_size = 8

[sim]
trials = 10000
seed = 1
early_stop_errors = 100
chunk_size = 256

[bounds]
p_grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
n = 12
fer_target = 1e-5
"""
    output.write_text(template, encoding="utf-8")
    print(f"Created {output}")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help=f"Path to {CONFIG_NAME}")
    p.add_argument("--out", help="Output directory")
    p.add_argument("--workers", type=int, help="Parallel Monte-Carlo workers")
    p.add_argument("--seed", type=int, help="Seed for every random stream")


def _add_code(p: argparse.ArgumentParser) -> None:
    p.add_argument("--channel", choices=["bec", "awgn"])
    p.add_argument("--p", type=float, help="BEC erasure probability")
    p.add_argument("--snr", type=float, help="AWGN SNR (Es/N0) in dB")
    p.add_argument("--capacity", type=float, help="AWGN channel by capacity")
    p.add_argument("--n", type=int, help="Code length 2^n")
    target = p.add_mutually_exclusive_group()
    target.add_argument("--rate", type=float)
    target.add_argument("--fer-target", type=float)
    p.add_argument("--scenario", choices=["fp", "gc", "bc", "ac", "gc-mrp", "ac-mrp"])
    p.add_argument("--reliability", choices=["auto", "exact", "ga", "mc"])
    p.add_argument("--crc", action="store_true", help="Attach a CRC (CRC-16 by default)")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="relaxpolar",
        description="Relaxed polar code construction, bounds and Monte-Carlo simulation",
    )
    parser.add_argument("--version", action="version", version=f"relaxpolar {__version__}")

    sub = parser.add_subparsers(dest="command")

    # construct
    p_construct = sub.add_parser("construct", help="Design a code and write its artifacts")
    _add_common(p_construct)
    _add_code(p_construct)
    p_construct.set_defaults(func=cmd_construct)

    # bounds
    p_bounds = sub.add_parser("bounds", help="Evaluate bounds over a BEC p grid")
    _add_common(p_bounds)
    p_bounds.add_argument("--p-grid", type=float, nargs="+", help="Erasure probabilities")
    p_bounds.add_argument("--n", dest="bounds_n", type=int, help="Code length 2^n")
    p_bounds.add_argument("--fer-target", dest="bounds_fer_target", type=float)
    p_bounds.set_defaults(func=cmd_bounds)

    # fer
    p_fer = sub.add_parser("fer", help="Monte-Carlo FER/BER sweep")
    _add_common(p_fer)
    _add_code(p_fer)
    p_fer.add_argument("--code", help="Saved code spec JSON (skips construction)")
    p_fer.add_argument("--decoder", choices=["sc", "list", "sscd"])
    p_fer.add_argument("--list-size", type=int)
    p_fer.add_argument("--min-sum", action="store_true")
    p_fer.add_argument("--trials", type=int)
    p_fer.add_argument("--early-stop-errors", type=int)
    p_fer.add_argument("--points", type=float, nargs="+", help="p values (BEC) or SNRs in dB (AWGN)")
    p_fer.set_defaults(func=cmd_fer)

    # verify
    p_verify = sub.add_parser("verify", help="Run a verification suite")
    p_verify.add_argument("suite", choices=[*SUITES, "all"])
    _add_common(p_verify)
    p_verify.add_argument("--genie-trials", type=int, help="Trials for the genie suite")
    p_verify.set_defaults(func=cmd_verify)

    # check
    p_check = sub.add_parser("check", help="Validate config and exit")
    p_check.add_argument("-c", "--config", help=f"Path to {CONFIG_NAME}")
    p_check.set_defaults(func=cmd_check)

    # init
    p_init = sub.add_parser("init", help=f"Generate starter {CONFIG_NAME}")
    p_init.add_argument("-o", "--output", help=f"Output file (default: {CONFIG_NAME})")
    p_init.add_argument("-f", "--force", action="store_true", help="Overwrite existing file")
    p_init.set_defaults(func=cmd_init)

    parsed = parser.parse_args(argv)
    if not hasattr(parsed, "func"):
        parser.print_help()
        return EXIT_ERROR

    return _dispatch(parsed.func, parsed)


def _dispatch(func: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    try:
        return func(args)
    except VerificationError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ResourceLimitError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RelaxPolarError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
