"""
Sweeps and statistics over the read-out chain

Every sweep evaluates its grid points independently and returns a
DataFrame in grid order. A point that raises a ReadoutError (an
impossible read, or a value outside a device validity window) is logged,
kept as a row with its error message and the sweep carries on.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from autorange import AutorangeStatus, MemristorRead, autorange_system
from capacitor_array import apply_mismatch
from components.memristor import MemristorState
from components.node_solver import solve_bottom_voltage
import constants
from exceptions import ConfigError, DomainError, ReadoutError
from pipeline import RESULT_COLUMNS, read_out
from sar_adc import measure_inl_dnl
from setup_system import MonteCarloConfig, SystemConfig

logger = logging.getLogger(__name__)


class SweepVariable(enum.Enum):
    CONDUCTANCE = "conductance" # siemens
    CURRENT = "current" # amperes


class Spacing(enum.Enum):
    LOG = "log"
    LINEAR = "linear"


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    lo: float
    hi: float
    points: int
    spacing: Spacing = Spacing.LOG

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ConfigError(f"sweep needs lo < hi, got [{self.lo!r}, {self.hi!r}]")
        if self.points < 2:
            raise ConfigError(f"sweep needs at least 2 points, got {self.points}")
        if self.spacing is Spacing.LOG and not self.lo > 0:
            raise ConfigError(f"log sweep needs lo > 0, got {self.lo!r}")

    def values(self) -> np.ndarray:
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class BaselineSpec:
    """The conventional read-out: one fixed bank resistor, no feedback"""

    index: int = 1 # the 10R device

    def __post_init__(self) -> None:
        if not 0 <= self.index < constants.BANK_SIZE:
            raise ConfigError(
                f"baseline resistor index must be in 0..{constants.BANK_SIZE - 1}, got {self.index}"
            )


def _require(spec: SweepSpec, variable: SweepVariable, what: str) -> None:
    if spec.variable is not variable:
        raise ConfigError(f"{what} sweeps {variable.value}, got a {spec.variable.value} sweep")


def _point_failed(what: str, value: float, exc: ReadoutError) -> str:
    logger.warning("%s %.6g: %s: %s", what, value, type(exc).__name__, exc)
    return f"{type(exc).__name__}: {exc}"


def baseline_bottom_voltage(conductance: float, cfg: SystemConfig, baseline: BaselineSpec) -> float:
    """Bottom voltage with the fixed baseline resistor in circuit"""
    return solve_bottom_voltage(
        MemristorState(conductance),
        cfg.bank.device(baseline.index),
        cfg.v_read,
        linear=cfg.bank.linear_mode,
    )


#----------------------------#
#   CONDUCTANCE SWEEPS       #
#----------------------------#

CONVERSION_COLUMNS = [
    "conductance_S", "v_bottom_auto_V", "v_bottom_baseline_V",
    "range_onehot", "status", "in_window", "error",
]


def sweep_conversion(
    spec: SweepSpec, cfg: SystemConfig, baseline: BaselineSpec = BaselineSpec()
) -> pd.DataFrame:
    """Autoranged against fixed-resistor bottom voltage over a conductance grid"""
    _require(spec, SweepVariable.CONDUCTANCE, "sweep_conversion")
    low, high = constants.lock_window
    rows = []
    for g in spec.values():
        row = dict.fromkeys(CONVERSION_COLUMNS, math.nan)
        row.update(conductance_S=g, range_onehot="", status="", in_window=False, error="")
        try:
            outcome = autorange_system(MemristorRead(MemristorState(g), cfg.v_read), cfg)
            row.update(
                v_bottom_auto_V=outcome.v_bottom,
                range_onehot=str(outcome.range),
                status=str(outcome.status),
                in_window=low <= outcome.v_bottom <= high,
            )
            row["v_bottom_baseline_V"] = baseline_bottom_voltage(g, cfg, baseline)
        except ReadoutError as exc:
            row["error"] = _point_failed("conductance", g, exc)
        rows.append(row)

    frame = pd.DataFrame(rows, columns=CONVERSION_COLUMNS)
    locked = frame[frame["status"] == str(AutorangeStatus.LOCKED)]
    logger.info(
        "conversion sweep: %d points, %d locked, autoranged V_bottom in [%.4g, %.4g] V",
        len(frame), len(locked),
        locked["v_bottom_auto_V"].min(), locked["v_bottom_auto_V"].max(),
    )
    return frame


LINEARITY_COLUMNS = [
    "conductance_S", "ideal_A", "auto_A", "baseline_A",
    "auto_deviation", "baseline_deviation",
    "envelope_low_A", "envelope_high_A", "range_onehot", "status", "error",
]


def sweep_linearity(
    spec: SweepSpec, cfg: SystemConfig, baseline: BaselineSpec = BaselineSpec()
) -> pd.DataFrame:
    """
    Read current against the ideal v_read * G

    Deviations are relative to the ideal current. The two envelopes hold
    the bottom node at the edges of the autoranged window.
    """
    _require(spec, SweepVariable.CONDUCTANCE, "sweep_linearity")
    env_low, env_high = constants.linearity_envelope
    rows = []
    for g in spec.values():
        ideal = cfg.v_read * g
        row = dict.fromkeys(LINEARITY_COLUMNS, math.nan)
        row.update(
            conductance_S=g,
            ideal_A=ideal,
            envelope_low_A=(cfg.v_read - env_low) * g,
            envelope_high_A=(cfg.v_read - env_high) * g,
            range_onehot="",
            status="",
            error="",
        )
        try:
            outcome = autorange_system(MemristorRead(MemristorState(g), cfg.v_read), cfg)
            auto = (cfg.v_read - outcome.v_bottom) * g
            fixed = (cfg.v_read - baseline_bottom_voltage(g, cfg, baseline)) * g
            row.update(
                auto_A=auto,
                baseline_A=fixed,
                auto_deviation=(ideal - auto) / ideal,
                baseline_deviation=(ideal - fixed) / ideal,
                range_onehot=str(outcome.range),
                status=str(outcome.status),
            )
        except ReadoutError as exc:
            row["error"] = _point_failed("conductance", g, exc)
        rows.append(row)

    frame = pd.DataFrame(rows, columns=LINEARITY_COLUMNS)
    logger.info(
        "linearity sweep: worst deviation %.3g (autoranged) vs %.3g (baseline)",
        frame["auto_deviation"].max(), frame["baseline_deviation"].max(),
    )
    return frame


#----------------------#
#   CURRENT SWEEPS     #
#----------------------#

FULL_RANGE_COLUMNS = RESULT_COLUMNS + ["error"]


def _read_rows(spec: SweepSpec, cfg: SystemConfig) -> pd.DataFrame:
    rows = []
    for current in spec.values():
        try:
            row = read_out(float(current), cfg).as_row()
            row["error"] = ""
        except ReadoutError as exc:
            row = dict.fromkeys(FULL_RANGE_COLUMNS, math.nan)
            row.update(
                input_A=current,
                range_onehot="",
                status=type(exc).__name__,
                error=_point_failed("current", current, exc),
            )
        rows.append(row)
    frame = pd.DataFrame(rows, columns=FULL_RANGE_COLUMNS)
    # Keep integer columns integral next to failed (NaN) rows
    return frame.astype({"code": "Int64", "cycles": "Int64"})


def sweep_full_range(spec: SweepSpec, cfg: SystemConfig) -> pd.DataFrame:
    """Read every current of the grid through the whole chain"""
    _require(spec, SweepVariable.CURRENT, "sweep_full_range")
    frame = _read_rows(spec, cfg)
    locked = frame[frame["status"] == str(AutorangeStatus.LOCKED)]
    logger.info(
        "full-range sweep: %d/%d locked over %d ranges, v_out in [%.4g, %.4g] V",
        len(locked), len(frame), locked["range_onehot"].nunique(),
        locked["v_out_V"].min(), locked["v_out_V"].max(),
    )
    return frame


class LockDomain(NamedTuple):
    index: int
    lower: float # smallest current that locks on this resistor
    upper: float # where the next lower resistor takes over, or OverRange

    @property
    def decade_centre(self) -> float:
        """Geometric centre of the decade above `lower`"""
        return self.lower * math.sqrt(10.0)


def lock_domains(cfg: SystemConfig) -> List[LockDomain]:
    """
    Current domain each resistor locks, from the nominal chain

    A resistor takes over once its bottom voltage lifts the amplified
    output to the comparator threshold.
    """
    gain = cfg.amp.effective_gain
    v_lock = (cfg.cmp.threshold - cfg.cmp.offset - cfg.amp.common_mode) / gain
    v_ceiling = (cfg.adc.input_range[1] - cfg.amp.common_mode) / gain
    lowers = [
        cfg.bank.current(index, v_lock) for index in range(constants.BANK_SIZE)
    ]
    uppers = [cfg.bank.current(0, v_ceiling)] + lowers[:-1]
    return [
        LockDomain(index, lower, upper)
        for index, (lower, upper) in enumerate(zip(lowers, uppers))
    ]


class RoundtripSummary(NamedTuple):
    max_error: float
    mean_error: float
    p95_error: float
    frame: pd.DataFrame


def roundtrip_error(spec: SweepSpec, cfg: SystemConfig) -> RoundtripSummary:
    """Relative decode error |decoded - input| / input over a current grid"""
    _require(spec, SweepVariable.CURRENT, "roundtrip_error")
    frame = _read_rows(spec, cfg)
    frame["relative_error"] = (frame["decoded_A"] - frame["input_A"]).abs() / frame["input_A"]
    locked = frame.loc[frame["status"] == str(AutorangeStatus.LOCKED), "relative_error"]
    summary = RoundtripSummary(
        max_error=float(locked.max()),
        mean_error=float(locked.mean()),
        p95_error=float(np.percentile(locked, 95)) if len(locked) else math.nan,
        frame=frame,
    )
    logger.info(
        "roundtrip: max %.4g, mean %.4g, p95 %.4g relative error",
        summary.max_error, summary.mean_error, summary.p95_error,
    )
    return summary


#-------------------#
#   MONTE CARLO     #
#-------------------#

@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    grid: np.ndarray # amperes
    samples: np.ndarray # v_out per (trial, grid point), NaN where the read failed
    in_range_fraction: float # of all reads
    trial_pass_fraction: float # trials with every read inside the ADC range
    failures: int
    failure_messages: tuple

    @property
    def trials(self) -> int:
        return self.samples.shape[0]

    @property
    def spread(self) -> np.ndarray:
        """Relative v_out spread (std / mean) per grid point"""
        ddof = 1 if self.trials > 1 else 0
        return np.nanstd(self.samples, axis=0, ddof=ddof) / np.nanmean(self.samples, axis=0)

    @property
    def relative_spread(self) -> float:
        return float(np.mean(self.spread))

    def frame(self) -> pd.DataFrame:
        trials, points = self.samples.shape
        return pd.DataFrame(
            {
                "trial": np.repeat(np.arange(trials), points),
                "input_A": np.tile(self.grid, trials),
                "v_out_V": self.samples.ravel(),
            }
        )


def default_grid(cfg: SystemConfig) -> np.ndarray:
    """One current per resistor, a half decade above its lock threshold"""
    return np.array([domain.decade_centre for domain in lock_domains(cfg)])


def perturbed_system(cfg: SystemConfig, sigmas: MonteCarloConfig, rng: np.random.Generator):
    """
    Draw one mismatched chain

    Draw order is fixed (resistor trims, gain, common mode, capacitor seed)
    so each trial stream is reproducible even with some sigmas at zero.
    """
    trims = np.asarray(cfg.bank.calibration) * rng.normal(1.0, sigmas.resistor_sigma, constants.BANK_SIZE)
    gain_error = cfg.amp.gain_error + rng.normal(0.0, sigmas.gain_sigma)
    common_mode = cfg.amp.common_mode + rng.normal(0.0, sigmas.vcm_sigma)
    capacitor_seed = int(rng.integers(2 ** 32))

    trial_cfg = replace(
        cfg,
        bank=cfg.bank.with_calibration(tuple(float(t) for t in trims)),
        amp=replace(cfg.amp, gain_error=float(gain_error), common_mode=float(common_mode)),
    )
    array = apply_mismatch(cfg.adc.array(), sigmas.capacitor_sigma, capacitor_seed)
    return trial_cfg, array


def monte_carlo(
    cfg: SystemConfig,
    sigmas: Optional[MonteCarloConfig] = None,
    n: Optional[int] = None,
    seed: int = 0,
    grid: Optional[Sequence[float]] = None,
) -> MonteCarloSummary:
    """
    Spread of v_out across mismatched chains and how much of it the ADC range keeps

    Trial t draws from default_rng([seed, t]), so the first n trials of a
    larger run are the same n trials.
    """
    sigmas = sigmas or cfg.montecarlo
    n = sigmas.trials if n is None else n
    if n < 1:
        raise ConfigError(f"monte carlo needs n >= 1, got {n}")
    grid = default_grid(cfg) if grid is None else np.asarray(grid, dtype=float)
    v_lo, v_hi = cfg.adc.input_range

    samples = np.full((n, len(grid)), np.nan)
    messages = []
    passed = 0
    for trial in range(n):
        rng = np.random.default_rng([seed, trial])
        trial_ok = True
        try:
            trial_cfg, array = perturbed_system(cfg, sigmas, rng)
        except ReadoutError as exc:
            messages.append(f"trial {trial}: {type(exc).__name__}: {exc}")
            continue
        for point, current in enumerate(grid):
            try:
                result = read_out(float(current), trial_cfg, array)
            except DomainError as exc:
                messages.append(f"trial {trial}, {current:.6g} A: {type(exc).__name__}: {exc}")
                trial_ok = False
                continue
            samples[trial, point] = result.v_out
            if result.status is not AutorangeStatus.LOCKED or not v_lo <= result.v_out <= v_hi:
                trial_ok = False
        passed += trial_ok

    for message in messages:
        logger.warning("monte carlo %s", message)
    in_range = np.isfinite(samples) & (samples >= v_lo) & (samples <= v_hi)
    summary = MonteCarloSummary(
        grid=grid,
        samples=samples,
        in_range_fraction=float(in_range.mean()),
        trial_pass_fraction=passed / n,
        failures=len(messages),
        failure_messages=tuple(messages),
    )
    logger.info(
        "monte carlo: %d trials, relative spread %.3g, %.4g of reads inside [%g, %g] V",
        n, summary.relative_spread, summary.in_range_fraction, v_lo, v_hi,
    )
    return summary


LINEARITY_DISTRIBUTION_COLUMNS = [
    "trial", "inl_max", "inl_min", "dnl_max", "dnl_min", "missing_codes",
]


def linearity_distribution(cfg: SystemConfig, sigma: float, n: int, seed: int = 0) -> pd.DataFrame:
    """Peak INL/DNL of `n` capacitor arrays drawn with unit mismatch `sigma`"""
    if n < 1:
        raise ConfigError(f"linearity distribution needs n >= 1, got {n}")
    nominal = cfg.adc.array()
    rows = []
    for trial in range(n):
        array = apply_mismatch(nominal, sigma, [seed, trial])
        linearity = measure_inl_dnl(cfg.adc, array)
        rows.append(
            {
                "trial": trial,
                "inl_max": float(linearity.inl.max()),
                "inl_min": float(linearity.inl.min()),
                "dnl_max": float(linearity.dnl.max()),
                "dnl_min": float(linearity.dnl.min()),
                "missing_codes": len(linearity.missing_codes),
            }
        )
    frame = pd.DataFrame(rows, columns=LINEARITY_DISTRIBUTION_COLUMNS)
    logger.info(
        "%d arrays at sigma %g: worst INL %+.3f/%+.3f LSB, worst DNL %+.3f/%+.3f LSB",
        n, sigma, frame["inl_max"].max(), frame["inl_min"].min(),
        frame["dnl_max"].max(), frame["dnl_min"].min(),
    )
    return frame
