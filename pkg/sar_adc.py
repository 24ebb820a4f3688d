"""
12-bit successive-approximation ADC

`convert` is the ideal differential converter. `simulate_switching` is the
charge-conservation oracle: it switches the bottom plates of a capacitor
array one event at a time, keeps the floating top-plate charge fixed and
books the energy each event costs.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
import pandas as pd

import constants
from capacitor_array import (
    Architecture,
    CapArray,
    CapRole,
    build_array,
)
from exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdcConfig:
    bits: int = constants.adc_bits
    input_range: Tuple[float, float] = (constants.adc_v_lo, constants.adc_v_hi)
    v_ref: float = constants.adc_v_ref
    unit_capacitance: float = constants.unit_capacitance
    architecture: Architecture = Architecture.SPLIT_MSB

    def __post_init__(self) -> None:
        if self.bits < 2:
            raise ConfigError(f"adc.bits must be >= 2, got {self.bits}")
        v_lo, v_hi = self.input_range
        if not v_hi > v_lo:
            raise ConfigError(f"adc input range needs v_hi > v_lo, got {self.input_range}")
        if not self.unit_capacitance > 0:
            raise ConfigError(f"adc.unit_capacitance must be > 0, got {self.unit_capacitance!r}")
        if not self.v_ref > 0:
            raise ConfigError(f"adc.v_ref must be > 0, got {self.v_ref!r}")

    @property
    def levels(self) -> int:
        return 2 ** self.bits

    @property
    def span(self) -> float:
        return self.input_range[1] - self.input_range[0]

    @property
    def lsb(self) -> float:
        """(v_hi - v_lo) / 2^bits"""
        return self.span / self.levels

    def array(self) -> CapArray:
        """Nominal capacitor array of the configured architecture"""
        return build_array(self.bits, self.architecture, self.unit_capacitance)

    def oracle_input(self, v_in):
        """Refer an input voltage to the array frame: v_lo maps to 0, v_hi to v_ref"""
        scale = self.v_ref / self.span
        return (np.asarray(v_in, dtype=float) - self.input_range[0]) * scale


@dataclass(frozen=True)
class AdcCode:
    value: int
    clipped_low: bool = False
    clipped_high: bool = False


def convert(config: AdcConfig, v_in: float) -> AdcCode:
    """
    Ideal conversion, MSB first, one comparator decision per bit

    The two half-arrays sample a differential pair around mid-range and
    switch complementarily, so each decision weighs (v_p - v_n) against
    (trial - 2^(bits-1)) LSB. That is the same as comparing the input,
    referred to v_lo, against the trial code, which is what is computed.
    """
    v_lo, v_hi = config.input_range
    clipped_low = v_in < v_lo
    clipped_high = v_in > v_hi
    v = min(max(v_in, v_lo), v_hi)
    position = (v - v_lo) / config.lsb

    code = 0
    for bit in reversed(range(config.bits)):
        trial = code | (1 << bit)
        if position >= trial:
            code = trial
    return AdcCode(code, clipped_low=clipped_low, clipped_high=clipped_high)


def code_to_voltage(config: AdcConfig, code: AdcCode) -> float:
    """Midpoint of the code's bin"""
    if not 0 <= code.value < config.levels:
        raise ConfigError(f"code {code.value} outside 0..{config.levels - 1}")
    return config.input_range[0] + (code.value + 0.5) * config.lsb


#------------------------------#
#   CHARGE-CONSERVATION ORACLE #
#------------------------------#

class Transition(enum.Enum):
    UP = "up" # previous bit kept
    DOWN = "down" # previous bit rejected

    def __str__(self) -> str:
        return self.value


class Accounting(enum.Enum):
    REFERENCE_DRAWN = "reference-drawn"
    CHARGE_AND_DISCHARGE = "charge-and-discharge" # also books charge dumped to ground on down steps

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SwitchingStep:
    bit_index: int # SAR bit being tested, 1 = MSB
    transition: Transition
    energy: float # joules


@dataclass(frozen=True)
class EnergyReport:
    per_step: Tuple[SwitchingStep, ...]
    accounting: Accounting
    max_charge_error: float # coulombs, largest top-plate charge drift seen

    @property
    def total(self) -> float:
        return sum(step.energy for step in self.per_step)

    def frame(self) -> pd.DataFrame:
        """Ledger as a table: index (SAR bit, 1 = MSB), value (joules), transition"""
        return pd.DataFrame(
            {
                "index": [step.bit_index for step in self.per_step],
                "value": [step.energy for step in self.per_step],
                "transition": [str(step.transition) for step in self.per_step],
            }
        )


class _OracleRun(NamedTuple):
    codes: np.ndarray # (inputs,)
    energies: np.ndarray # (inputs, bits)
    kept: np.ndarray # (inputs, bits) comparator decisions
    max_charge_error: float


def _initial_state(array: CapArray, rows: int) -> np.ndarray:
    """Bottom plates tied to V_ref for the MSB trial"""
    if array.topology is Architecture.CONVENTIONAL:
        first = np.array([role == CapRole("main", 1) for role in array.roles])
    else:
        first = np.array([role.group == "msb" for role in array.roles])
    return np.tile(first, (rows, 1))


def _switch(array: CapArray, at_ref: np.ndarray, decided_bit: int, kept: np.ndarray) -> np.ndarray:
    """Move from the trial of `decided_bit` to the trial of the next bit"""
    position = array.position
    at_ref = at_ref.copy()
    main_next = position[CapRole("main", decided_bit + 1)]
    if array.topology is Architecture.CONVENTIONAL:
        # Rejected: discharge this bit's capacitor, then charge the next one
        at_ref[:, position[CapRole("main", decided_bit)]] &= kept
        at_ref[:, main_next] = True
    else:
        # Kept: charge the next main capacitor. Rejected: discharge the
        # next capacitor of the MSB replica, nothing else moves
        at_ref[:, main_next] |= kept
        at_ref[:, position[CapRole("msb", decided_bit + 1)]] &= kept
    return at_ref


def _run_oracle(
    array: CapArray,
    v_in: np.ndarray,
    v_ref: float,
    accounting: Accounting = Accounting.REFERENCE_DRAWN,
    with_energy: bool = True,
) -> _OracleRun:
    caps = array.capacitances
    c_total = caps.sum()
    bits = array.bits
    v_in = np.atleast_1d(np.asarray(v_in, dtype=float))
    rows = v_in.shape[0]

    # Sampling: top plate held at 0 while every bottom plate tracks v_in
    v_bottom = np.repeat(v_in[:, None], len(caps), axis=1)
    v_top = np.zeros(rows)
    q_top = (v_top[:, None] - v_bottom) @ caps

    at_ref = _initial_state(array, rows)
    codes = np.zeros(rows, dtype=np.int64)
    energies = np.zeros((rows, bits))
    kept_log = np.zeros((rows, bits), dtype=bool)
    down = np.zeros(rows, dtype=bool) # the MSB trial comes straight from sampling
    max_error = 0.0

    for bit in range(1, bits + 1):
        new_bottom = np.where(at_ref, v_ref, 0.0)
        new_top = (q_top + new_bottom @ caps) / c_total

        if with_energy:
            # Bottom-plate charge C (V_b - V_x) before and after the event
            dq = ((new_bottom - new_top[:, None]) - (v_bottom - v_top[:, None])) * caps
            drawn = v_ref * np.where(at_ref, dq, 0.0).sum(axis=1)
            step = drawn
            if accounting is Accounting.CHARGE_AND_DISCHARGE:
                returned = -np.where(at_ref, 0.0, dq).sum(axis=1)
                step = drawn + np.where(down, v_ref * returned, 0.0)
            energies[:, bit - 1] = step
            q_after = (new_top[:, None] - new_bottom) @ caps
            max_error = max(max_error, float(np.max(np.abs(q_after - q_top))))

        kept = new_top <= 0.0
        kept_log[:, bit - 1] = kept
        codes |= kept.astype(np.int64) << (bits - bit)
        if bit == bits:
            break
        v_bottom, v_top = new_bottom, new_top
        at_ref = _switch(array, at_ref, bit, kept)
        down = ~kept

    return _OracleRun(codes, energies, kept_log, max_error)


def simulate_switching(
    array: CapArray,
    v_in: float,
    v_ref: float,
    accounting: Accounting = Accounting.REFERENCE_DRAWN,
) -> Tuple[AdcCode, EnergyReport]:
    """
    Convert `v_in` (array frame, 0..v_ref) event by event

    Returns the code and the ledger of reference energy per switching
    event. No event follows the final (LSB) decision.
    """
    run = _run_oracle(array, np.array([v_in]), v_ref, accounting)
    steps = []
    for bit in range(1, array.bits + 1):
        if bit == 1 or run.kept[0, bit - 2]:
            transition = Transition.UP
        else:
            transition = Transition.DOWN
        steps.append(SwitchingStep(bit, transition, float(run.energies[0, bit - 1])))
    code = AdcCode(
        int(run.codes[0]), clipped_low=v_in < 0.0, clipped_high=v_in > v_ref
    )
    return code, EnergyReport(tuple(steps), accounting, run.max_charge_error)


def switching_codes(array: CapArray, v_in, v_ref: float) -> np.ndarray:
    """Codes the oracle decides for many inputs at once (array frame)"""
    return _run_oracle(array, v_in, v_ref, with_energy=False).codes


def convert_with_array(config: AdcConfig, array: CapArray, v_in: float) -> AdcCode:
    """Convert through a (possibly mismatched) array instead of the ideal transfer"""
    v_lo, v_hi = config.input_range
    value = int(switching_codes(array, config.oracle_input(v_in), config.v_ref)[0])
    return AdcCode(value, clipped_low=v_in < v_lo, clipped_high=v_in > v_hi)


class EnergyAverages(NamedTuple):
    conventional: float # joules per conversion
    split_msb: float
    saving_ratio: float # 1 - split / conventional


def step_energies(
    config: AdcConfig,
    topology: Architecture,
    accounting: Accounting = Accounting.REFERENCE_DRAWN,
) -> np.ndarray:
    """Energy of every switching event, shape (codes, bits), input at each bin centre"""
    array = build_array(config.bits, topology, config.unit_capacitance)
    centres = (np.arange(config.levels) + 0.5) * config.v_ref / config.levels
    return _run_oracle(array, centres, config.v_ref, accounting).energies


def code_energies(config: AdcConfig, topology: Architecture) -> np.ndarray:
    """Total ReferenceDrawn energy of every code"""
    return step_energies(config, topology).sum(axis=1)


def average_energy(config: AdcConfig) -> EnergyAverages:
    """Mean conversion energy over all codes for both architectures"""
    if config.bits > 14:
        raise ConfigError(f"exhaustive energy average needs bits <= 14, got {config.bits}")
    conventional = float(code_energies(config, Architecture.CONVENTIONAL).mean())
    split = float(code_energies(config, Architecture.SPLIT_MSB).mean())
    saving = 1.0 - split / conventional
    logger.info(
        "%d-bit average switching energy: conventional %.4e J, split-msb %.4e J, saving %.2f %%",
        config.bits, conventional, split, 100.0 * saving,
    )
    return EnergyAverages(conventional, split, saving)


#-------------#
#   INL/DNL   #
#-------------#

@dataclass(frozen=True, eq=False)
class Linearity:
    transitions: np.ndarray # volts, T[1] .. T[2^bits - 1]
    dnl: np.ndarray # LSB, codes 1 .. 2^bits - 2
    inl: np.ndarray # LSB, endpoint fit, transitions 1 .. 2^bits - 1
    missing_codes: Tuple[int, ...]


def transition_levels(config: AdcConfig, array: CapArray) -> np.ndarray:
    """
    Code-transition levels in LSB, by bisection on the oracle

    Each bracket spans the whole range and is anchored on the ideal code
    grid shifted by TRANSITION_OFFSET, so midpoints never land on an ideal
    code edge and every transition of an ideal array ends with the same
    residual.
    """
    if array.bits != config.bits:
        raise ConfigError(f"array has {array.bits} bits, config {config.bits}")
    levels = config.levels
    k = np.arange(1, levels)
    anchor = k - constants.TRANSITION_OFFSET
    low = anchor - levels
    high = anchor + levels
    lsb_ref = config.v_ref / levels
    iterations = config.bits + 1 + int(round(-np.log2(constants.TRANSITION_RESOLUTION)))
    for _ in range(iterations):
        midpoint = (low + high) / 2.0
        above = switching_codes(array, midpoint * lsb_ref, config.v_ref) >= k
        high = np.where(above, midpoint, high)
        low = np.where(above, low, midpoint)
    return (low + high) / 2.0


def measure_inl_dnl(config: AdcConfig, array: CapArray) -> Linearity:
    """Transition-voltage INL/DNL, INL with an endpoint fit"""
    levels_lsb = transition_levels(config, array)
    widths = np.diff(levels_lsb)
    dnl = widths - 1.0
    missing = widths <= constants.TRANSITION_RESOLUTION
    dnl[missing] = -1.0
    missing_codes = tuple(int(code) for code in np.nonzero(missing)[0] + 1)
    if missing_codes:
        logger.warning("missing codes: %s", missing_codes)

    slope = (levels_lsb[-1] - levels_lsb[0]) / (config.levels - 2)
    inl = (levels_lsb - levels_lsb[0]) / slope - np.arange(config.levels - 1)
    transitions = config.input_range[0] + levels_lsb * config.lsb
    return Linearity(transitions, dnl, inl, missing_codes)
