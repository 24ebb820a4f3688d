"""Command-line front door: one experiment per run, a CSV and a sidecar out."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, replace
from typing import Callable, Dict, NoReturn, Optional, Tuple

import numpy as np
import pandas as pd

import analysis
from analysis import SweepSpec, SweepVariable
from autorange import AutorangeStatus, CurrentInjection, autorange_system
from capacitor_array import apply_mismatch
import constants
from exceptions import ConfigError, DomainError, OverRange
import export
from pipeline import read_out, read_rate
from sar_adc import Accounting, average_energy, measure_inl_dnl, simulate_switching
from setup_system import RUN_SECTION, SystemConfig, load_config, read_ini

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2
EXIT_IO = 3

# Grid of each sweep command: (variable, lo, hi, default points)
SWEEPS = {
    "sweep-conversion": (SweepVariable.CONDUCTANCE, 100e-9, 5e-3, 200),
    "sweep-linearity": (SweepVariable.CONDUCTANCE, 100e-9, 5e-3, 200),
    "sweep-full-range": (SweepVariable.CURRENT, 20e-9, 2e-3, 500),
    "roundtrip": (SweepVariable.CURRENT, 25e-9, 1.8e-3, 500),
}
DEFAULT_TRACE_CURRENT = 355.66e-9
ACCOUNTING_MODES = frozenset(str(mode) for mode in Accounting)

# Command options a sidecar can hand back as defaults
OPTIONS = ("seed", "current", "bits", "points", "trials", "accounting")


@dataclass(frozen=True)
class RunManifest:
    """
    Everything one run needs; unset options fall back to the sidecar
    passed as config, then to the command defaults
    """

    command: str
    config_path: Optional[str] = None
    output_dir: str = "."
    seed: Optional[int] = None
    overrides: Tuple[str, ...] = ()
    current: Optional[float] = None
    bits: Optional[int] = None
    points: Optional[int] = None
    trials: Optional[int] = None
    accounting: Optional[str] = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.accounting is not None and self.accounting not in ACCOUNTING_MODES:
            raise ConfigError(
                f"unknown accounting {self.accounting!r}, expected one of {sorted(ACCOUNTING_MODES)}"
            )


def _replayed(manifest: RunManifest) -> RunManifest:
    """Fill unset options from the [run] section of a sidecar config"""
    if manifest.config_path is None:
        return manifest
    parser = read_ini(manifest.config_path)
    if not parser.has_section(RUN_SECTION):
        return manifest
    run = parser[RUN_SECTION]
    if run.get("command") != manifest.command:
        return manifest
    types = {"seed": int, "current": float, "bits": int, "points": int, "trials": int, "accounting": str}
    updates = {}
    for name in OPTIONS:
        if getattr(manifest, name) is None and name in run:
            try:
                updates[name] = types[name](run[name])
            except ValueError:
                raise ConfigError(f"[{RUN_SECTION}] {name}: cannot read {run[name]!r}") from None
    return replace(manifest, **updates)


def _sweep(manifest: RunManifest) -> Tuple[SweepSpec, Dict[str, str]]:
    variable, lo, hi, points = SWEEPS[manifest.command]
    points = manifest.points if manifest.points is not None else points
    return SweepSpec(variable, lo, hi, points), {"points": str(points)}


def _adc_bits(manifest: RunManifest, cfg: SystemConfig) -> SystemConfig:
    if manifest.bits is None:
        return cfg
    return replace(cfg, adc=replace(cfg.adc, bits=manifest.bits))


#----------------#
#   COMMANDS     #
#----------------#
# Each returns the table to write, the options it used and a result summary

CommandResult = Tuple[pd.DataFrame, Dict[str, str], Dict[str, str]]


def run_trace(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    current = manifest.current if manifest.current is not None else DEFAULT_TRACE_CURRENT
    outcome = autorange_system(CurrentInjection(current), cfg)
    if outcome.status is AutorangeStatus.OVER_RANGE:
        error = OverRange(
            f"{current:.6g} A drives v_out to {outcome.v_out:.6g} V on the lowest resistor",
            v_out=outcome.v_out,
        )
        error.cycle = 1
        raise error
    result = {
        "status": str(outcome.status),
        "range": str(outcome.range),
        "cycles": str(outcome.cycles),
        "v_out": repr(outcome.v_out),
        "read_rate_Hz": repr(read_rate(outcome.cycles, cfg)),
    }
    return outcome.trace_frame(), {"current": repr(current)}, result


def run_sweep_conversion(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    spec, options = _sweep(manifest)
    frame = analysis.sweep_conversion(spec, cfg)
    result = {
        "v_bottom_min": repr(float(frame["v_bottom_auto_V"].min())),
        "v_bottom_max": repr(float(frame["v_bottom_auto_V"].max())),
        "failures": str(int((frame["error"] != "").sum())),
    }
    return frame, options, result


def run_sweep_linearity(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    spec, options = _sweep(manifest)
    frame = analysis.sweep_linearity(spec, cfg)
    result = {
        "auto_deviation_max": repr(float(frame["auto_deviation"].max())),
        "baseline_deviation_max": repr(float(frame["baseline_deviation"].max())),
        "failures": str(int((frame["error"] != "").sum())),
    }
    return frame, options, result


def run_sweep_full_range(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    spec, options = _sweep(manifest)
    frame = analysis.sweep_full_range(spec, cfg)
    locked = frame[frame["status"] == str(AutorangeStatus.LOCKED)]
    result = {
        "locked": str(len(locked)),
        "domains": str(locked["range_onehot"].nunique()),
        "v_out_min": repr(float(locked["v_out_V"].min())),
        "v_out_max": repr(float(locked["v_out_V"].max())),
    }
    return frame, options, result


def run_roundtrip(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    spec, options = _sweep(manifest)
    summary = analysis.roundtrip_error(spec, cfg)
    result = {
        "max_error": repr(summary.max_error),
        "mean_error": repr(summary.mean_error),
        "p95_error": repr(summary.p95_error),
    }
    return summary.frame, options, result


def run_adc_energy(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    adc = _adc_bits(manifest, cfg).adc
    averages = average_energy(adc)
    frame = pd.DataFrame(
        {
            "bits": [adc.bits],
            "conventional_J": [averages.conventional],
            "split_msb_J": [averages.split_msb],
            "saving_ratio": [averages.saving_ratio],
        }
    )
    return frame, {"bits": str(adc.bits)}, {"saving_ratio": repr(averages.saving_ratio)}


def run_inl_dnl(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    cfg = _adc_bits(manifest, cfg)
    sigma = cfg.montecarlo.capacitor_sigma
    options = {"bits": str(cfg.adc.bits)}

    if manifest.trials is not None:
        frame = analysis.linearity_distribution(cfg, sigma, manifest.trials, seed)
        options["trials"] = str(manifest.trials)
        result = {
            "inl_worst": repr(float(max(frame["inl_max"].max(), -frame["inl_min"].min()))),
            "dnl_worst": repr(float(max(frame["dnl_max"].max(), -frame["dnl_min"].min()))),
            "arrays_with_missing_codes": str(int((frame["missing_codes"] > 0).sum())),
        }
        return frame, options, result

    array = apply_mismatch(cfg.adc.array(), sigma, seed)
    linearity = measure_inl_dnl(cfg.adc, array)
    parts = []
    for quantity, values in (
        ("transition_V", linearity.transitions),
        ("dnl_LSB", linearity.dnl),
        ("inl_LSB", linearity.inl),
    ):
        parts.append(
            pd.DataFrame(
                {"quantity": quantity, "index": np.arange(1, len(values) + 1), "value": values}
            )
        )
    result = {
        "inl_worst": repr(float(np.max(np.abs(linearity.inl)))),
        "dnl_worst": repr(float(np.max(np.abs(linearity.dnl)))),
        "missing_codes": str(len(linearity.missing_codes)),
    }
    return pd.concat(parts, ignore_index=True), options, result


def run_montecarlo(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    n = manifest.trials if manifest.trials is not None else cfg.montecarlo.trials
    summary = analysis.monte_carlo(cfg, n=n, seed=seed)
    result = {
        "relative_spread": repr(summary.relative_spread),
        "in_range_fraction": repr(summary.in_range_fraction),
        "trial_pass_fraction": repr(summary.trial_pass_fraction),
        "failures": str(summary.failures),
    }
    return summary.frame(), {"trials": str(n)}, result


def run_switching(manifest: RunManifest, cfg: SystemConfig, seed: int) -> CommandResult:
    """Per-event energy ledger of the conversion behind one read"""
    current = manifest.current if manifest.current is not None else DEFAULT_TRACE_CURRENT
    accounting = Accounting(manifest.accounting or str(Accounting.REFERENCE_DRAWN))
    read = read_out(current, cfg)
    code, report = simulate_switching(
        cfg.adc.array(), float(cfg.adc.oracle_input(read.v_out)), cfg.adc.v_ref, accounting
    )
    options = {"current": repr(current), "accounting": str(accounting)}
    result = {
        "code": str(code.value),
        "total_J": repr(report.total),
        "max_charge_error_C": repr(report.max_charge_error),
    }
    return report.frame(), options, result


COMMANDS: Dict[str, Callable[[RunManifest, SystemConfig, int], CommandResult]] = {
    "trace": run_trace,
    "sweep-conversion": run_sweep_conversion,
    "sweep-linearity": run_sweep_linearity,
    "sweep-full-range": run_sweep_full_range,
    "adc-energy": run_adc_energy,
    "inl-dnl": run_inl_dnl,
    "montecarlo": run_montecarlo,
    "roundtrip": run_roundtrip,
    "switching": run_switching,
}


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ConfigError instead of exiting"""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        description="Wide-dynamic-range memristor read-out simulator"
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="experiment to run")
    parser.add_argument("--config", help="INI configuration, or a .meta sidecar to replay")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument("--seed", type=int, help="random seed (default 0)")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    parser.add_argument("--current", type=float, help="trace, switching: injected current in amperes")
    parser.add_argument("--bits", type=int, help="adc-energy, inl-dnl: ADC resolution")
    parser.add_argument("--points", type=int, help="sweeps: number of grid points")
    parser.add_argument("--trials", type=int, help="montecarlo, inl-dnl: number of trials")
    parser.add_argument(
        "--accounting", choices=sorted(ACCOUNTING_MODES),
        help="switching: energy accounting (default reference-drawn)",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="log progress (twice for debug)"
    )
    return parser


def manifest_from_args(args: argparse.Namespace) -> RunManifest:
    return RunManifest(
        command=args.command,
        config_path=args.config,
        output_dir=args.out,
        seed=args.seed,
        overrides=tuple(args.overrides),
        current=args.current,
        bits=args.bits,
        points=args.points,
        trials=args.trials,
        accounting=args.accounting,
    )


def fail(exc: BaseException, code: int) -> int:
    print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def run(manifest: RunManifest) -> int:
    """Run one experiment and write <command>.csv and <command>.meta"""
    try:
        manifest = _replayed(manifest)
        seed = manifest.seed if manifest.seed is not None else 0
        cfg = load_config(manifest.config_path, manifest.overrides)
        os.makedirs(manifest.output_dir, exist_ok=True)
        logger.info("running %s, seed %d", manifest.command, seed)

        frame, options, result = COMMANDS[manifest.command](manifest, cfg, seed)

        run_section = {"command": manifest.command, "seed": str(seed)}
        run_section.update(options)
        run_section["version"] = constants.TOOL_VERSION
        run_section.update({f"result_{key}": value for key, value in result.items()})
        export.write_csv(frame, manifest.output_dir, manifest.command)
        export.write_meta(run_section, cfg, manifest.output_dir, manifest.command)
    except ConfigError as exc:
        return fail(exc, EXIT_CONFIG)
    except DomainError as exc:
        return fail(exc, EXIT_DOMAIN)
    except OSError as exc:
        return fail(exc, EXIT_IO)
    return EXIT_OK

