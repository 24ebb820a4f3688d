"""End-to-end read-out: autorange, digitise, decode."""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Optional, Union

from autorange import (
    AutorangeStatus,
    RangeCode,
    Stimulus,
    as_stimulus,
    autorange_system,
)
from capacitor_array import Architecture, CapArray, build_array
from components.memristor import MemristorState
import constants
from exceptions import DecodeError, DomainError, OverRange
from sar_adc import (
    AdcCode,
    code_to_voltage,
    convert,
    convert_with_array,
    simulate_switching,
)
from setup_system import SystemConfig

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "input_A", "range_onehot", "code", "v_out_V", "decoded_A",
    "cycles", "time_s", "energy_J", "status",
]


@dataclass(frozen=True)
class ReadoutResult:
    """One read: 5-bit range code plus 12-bit ADC code, and what it cost"""

    input_current: float
    range: RangeCode
    code: AdcCode
    v_out: float
    decoded_current: float
    cycles: int
    read_time: float
    adc_energy: float
    status: AutorangeStatus

    @property
    def relative_error(self) -> float:
        return abs(self.decoded_current - self.input_current) / self.input_current

    def as_row(self) -> dict:
        return {
            "input_A": self.input_current,
            "range_onehot": str(self.range),
            "code": self.code.value,
            "v_out_V": self.v_out,
            "decoded_A": self.decoded_current,
            "cycles": self.cycles,
            "time_s": self.read_time,
            "energy_J": self.adc_energy,
            "status": str(self.status),
        }


@functools.lru_cache(maxsize=None)
def _nominal_array(bits: int, topology: Architecture, unit_capacitance: float) -> CapArray:
    return build_array(bits, topology, unit_capacitance)


def read_time(cycles: int, cfg: SystemConfig) -> float:
    """Selector cycles plus one conversion at one SAR decision per clock"""
    if not 1 <= cycles <= constants.BANK_SIZE:
        raise DomainError(f"cycles must be in 1..{constants.BANK_SIZE}, got {cycles}")
    return cycles / cfg.selector_clock + cfg.adc.bits / cfg.sar_clock


def read_rate(cycles: int, cfg: SystemConfig) -> float:
    return 1.0 / read_time(cycles, cfg)


def decode_current(range_code: RangeCode, code: AdcCode, cfg: SystemConfig) -> float:
    """
    Current estimate from the composite output

    Uses the nominal gain and the tabled (trimmed, small-signal) resistance,
    so the triode compression of the real device shows up as a residual.
    """
    v_out = code_to_voltage(cfg.adc, code)
    signal = v_out - cfg.amp.common_mode
    if signal <= 0:
        raise DecodeError(
            f"code {code.value} decodes to {v_out:.6g} V, not above the "
            f"common mode {cfg.amp.common_mode:.6g} V"
        )
    return signal / (cfg.amp.gain * cfg.bank.nominal_resistance(range_code.index))


def read_out(
    target: Union[Stimulus, MemristorState, float],
    cfg: SystemConfig,
    array: Optional[CapArray] = None,
) -> ReadoutResult:
    """
    Read one memristor (or injected current) through the whole chain

    `array` replaces the ideal converter by the charge oracle of a given,
    possibly mismatched, capacitor array. UnderRange reads are still
    digitised on the top resistor and flagged.
    """
    stimulus = as_stimulus(target, cfg.v_read)
    outcome = autorange_system(stimulus, cfg)
    if outcome.status is AutorangeStatus.OVER_RANGE:
        error = OverRange(
            f"{stimulus.describe()} drives v_out to {outcome.v_out:.6g} V "
            f"on the lowest resistor, above the ADC ceiling {cfg.adc.input_range[1]:.6g} V",
            v_out=outcome.v_out,
        )
        error.cycle = 1
        raise error

    if array is None:
        code = convert(cfg.adc, outcome.v_out)
        oracle = _nominal_array(cfg.adc.bits, cfg.adc.architecture, cfg.adc.unit_capacitance)
    else:
        code = convert_with_array(cfg.adc, array, outcome.v_out)
        oracle = array
    _, report = simulate_switching(
        oracle, float(cfg.adc.oracle_input(outcome.v_out)), cfg.adc.v_ref
    )

    if outcome.status is AutorangeStatus.UNDER_RANGE:
        logger.warning(
            "%s: UnderRange, digitising %.6g V on the top resistor as a best effort",
            stimulus.describe(), outcome.v_out,
        )
        decoded = 0.0
        if not code.clipped_low:
            try:
                decoded = decode_current(outcome.range, code, cfg)
            except DecodeError:
                pass
    else:
        decoded = decode_current(outcome.range, code, cfg)

    return ReadoutResult(
        input_current=stimulus.input_current(outcome.v_bottom),
        range=outcome.range,
        code=code,
        v_out=outcome.v_out,
        decoded_current=decoded,
        cycles=outcome.cycles,
        read_time=read_time(outcome.cycles, cfg),
        adc_energy=report.total,
        status=outcome.status,
    )
