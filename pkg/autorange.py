"""Feedback magnitude estimation: the shift-register resistor selector loop."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import List, Tuple, TYPE_CHECKING, Union

import pandas as pd

import constants
from components.amplifier import AmplifierSpec, amplify
from components.comparator import ComparatorSpec, compare
from components.memristor import MemristorState
from components.node_solver import solve_bottom_voltage
from exceptions import DomainError, OverRange, SelectorSaturated, UnderRange

if TYPE_CHECKING:
    from components.resistor_bank import BankConfig
    from setup_system import SystemConfig

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["cycle", "one_hot", "v_bottom_V", "v_out_V", "comparator"]


@dataclass(frozen=True)
class RangeCode:
    """One-hot selection of a bank resistor; rendered LSB-last ("01000" = index 3)"""

    index: int

    def __post_init__(self) -> None:
        if not 0 <= self.index < constants.BANK_SIZE:
            raise DomainError(f"range index must be in 0..{constants.BANK_SIZE - 1}, got {self.index}")

    @property
    def one_hot(self) -> int:
        return 1 << self.index

    def __str__(self) -> str:
        return format(self.one_hot, f"0{constants.BANK_SIZE}b")


def step_selector(range_code: RangeCode) -> RangeCode:
    """Switch off the current resistor and switch on the next decade"""
    if range_code.index >= constants.BANK_SIZE - 1:
        raise SelectorSaturated(f"selector already at the top resistor ({range_code})")
    return RangeCode(range_code.index + 1)


class Stimulus:
    """What drives the bottom node: a memristor under read or a forced current"""

    def bottom_voltage(self, bank: BankConfig, index: int) -> float:
        """Return V_bottom with resistor `index` selected

        This method must be overridden by Stimulus subclasses
        """
        raise NotImplementedError()

    def input_current(self, v_bottom: float) -> float:
        """Current flowing into the bottom node once it sits at `v_bottom`"""
        raise NotImplementedError()

    def describe(self) -> str:
        raise NotImplementedError()


class MemristorRead(Stimulus):
    def __init__(self, memristor: MemristorState, v_read: float):
        self.memristor = memristor
        self.v_read = v_read

    def bottom_voltage(self, bank: BankConfig, index: int) -> float:
        return solve_bottom_voltage(
            self.memristor, bank.device(index), self.v_read, linear=bank.linear_mode
        )

    def describe(self) -> str:
        return f"memristor {self.memristor.conductance:.6g} S at {self.v_read:g} V"

    def input_current(self, v_bottom: float) -> float:
        return self.memristor.current(self.v_read, v_bottom)


class CurrentInjection(Stimulus):
    def __init__(self, current: float):
        self.current = current

    def bottom_voltage(self, bank: BankConfig, index: int) -> float:
        return bank.voltage_for_current(index, self.current)

    def describe(self) -> str:
        return f"injected {self.current:.6g} A"

    def input_current(self, v_bottom: float) -> float:
        return self.current


def as_stimulus(
    source: Union[Stimulus, MemristorState, float], v_read: float
) -> Stimulus:
    """Accept a stimulus, a memristor (read at `v_read`) or a current in amperes"""
    if isinstance(source, Stimulus):
        return source
    if isinstance(source, MemristorState):
        return MemristorRead(source, v_read)
    return CurrentInjection(float(source))


@dataclass(frozen=True)
class TraceEvent:
    cycle: int
    range: RangeCode
    v_bottom: float
    v_out: float
    comparator: bool


class AutorangeStatus(enum.Enum):
    LOCKED = "Locked"
    UNDER_RANGE = "UnderRange"
    OVER_RANGE = "OverRange"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AutorangeOutcome:
    range: RangeCode
    v_out: float
    trace: Tuple[TraceEvent, ...]
    status: AutorangeStatus

    @property
    def cycles(self) -> int:
        return len(self.trace)

    @property
    def v_bottom(self) -> float:
        return self.trace[-1].v_bottom

    def trace_frame(self) -> pd.DataFrame:
        """Return the trace as a table with the export column names"""
        return pd.DataFrame(
            [
                (event.cycle, str(event.range), event.v_bottom, event.v_out, event.comparator)
                for event in self.trace
            ],
            columns=TRACE_COLUMNS,
        )


def autorange(
    source: Union[Stimulus, MemristorState, float],
    bank: BankConfig,
    amp: AmplifierSpec,
    cmp: ComparatorSpec,
    adc_ceiling: float,
    v_read: float = constants.v_read,
) -> AutorangeOutcome:
    """
    Run convert -> amplify -> compare, starting from the lowest resistor

    Locks on the first resistor whose output passes the comparator. A
    first-cycle output above `adc_ceiling` aborts as OverRange; failing on
    the top resistor ends as UnderRange with its output kept for a
    best-effort conversion.
    """
    stimulus = as_stimulus(source, v_read)
    range_code = RangeCode(0)
    trace: List[TraceEvent] = []

    while True:
        cycle = range_code.index + 1
        try:
            v_bottom = stimulus.bottom_voltage(bank, range_code.index)
            amplified = amplify(amp, v_bottom)
        except DomainError as exc:
            exc.cycle = cycle
            raise
        v_out = amplified.voltage
        passed = compare(cmp, v_out)
        trace.append(TraceEvent(cycle, range_code, v_bottom, v_out, passed))
        logger.debug(
            "%s: cycle %d range %s v_bottom %.6e V v_out %.6e V cmp %s",
            stimulus.describe(), cycle, range_code, v_bottom, v_out, passed,
        )
        if amplified.saturated:
            logger.debug("%s: cycle %d amplifier clipped at %.4g V", stimulus.describe(), cycle, v_out)

        if cycle == 1 and v_out > adc_ceiling:
            status = AutorangeStatus.OVER_RANGE
            break
        if passed:
            status = AutorangeStatus.LOCKED
            break
        try:
            range_code = step_selector(range_code)
        except SelectorSaturated:
            status = AutorangeStatus.UNDER_RANGE
            break

    return AutorangeOutcome(
        range=range_code, v_out=trace[-1].v_out, trace=tuple(trace), status=status
    )


def autorange_system(
    source: Union[Stimulus, MemristorState, float], cfg: SystemConfig
) -> AutorangeOutcome:
    """Run `autorange` with every part taken from a system configuration"""
    return autorange(
        source, cfg.bank, cfg.amp, cfg.cmp, cfg.adc.input_range[1], v_read=cfg.v_read
    )


def cycles_needed(current: float, cfg: SystemConfig) -> int:
    """Number of selector cycles an injected `current` takes to lock"""
    outcome = autorange_system(CurrentInjection(current), cfg)
    if outcome.status is AutorangeStatus.OVER_RANGE:
        raise OverRange(
            f"{current:.6g} A drives v_out to {outcome.v_out:.6g} V on the lowest resistor",
            v_out=outcome.v_out,
        )
    if outcome.status is AutorangeStatus.UNDER_RANGE:
        raise UnderRange(
            f"{current:.6g} A only reaches {outcome.v_out:.6g} V on the largest resistor",
            v_out=outcome.v_out,
        )
    return outcome.cycles
