from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Tuple

import constants
from components import nmos_resistor
from components.nmos_resistor import NmosResistorSpec
from exceptions import ConfigError, TriodeDomainError


@dataclass(frozen=True)
class BankConfig:
    """
    Five switchable triode resistors around R, 10R, ..., 10^4 R

    Index 0 is the lowest resistance. `calibration` trims scale each device's
    on-resistance; `linear_mode` replaces the triode law by an ideal resistor
    at the trimmed small-signal on-resistance. `gate_voltages`, when given,
    drives each device at its own V_GS, which moves its on-resistance while
    the process gain factor stays put.
    """

    resistors: Tuple[NmosResistorSpec, ...]
    calibration: Tuple[float, ...] = (1.0,) * constants.BANK_SIZE
    linear_mode: bool = False
    gate_voltages: Tuple[float, ...] = () # empty: every device at its own gate_voltage

    def __post_init__(self) -> None:
        if len(self.resistors) != constants.BANK_SIZE:
            raise ConfigError(
                f"bank.resistors must have exactly {constants.BANK_SIZE} entries, "
                f"got {len(self.resistors)}"
            )
        if len(self.calibration) != constants.BANK_SIZE:
            raise ConfigError(
                f"bank.trims must have exactly {constants.BANK_SIZE} entries, "
                f"got {len(self.calibration)}"
            )
        if any(not trim > 0 for trim in self.calibration):
            raise ConfigError(f"bank.trims must all be > 0, got {self.calibration}")
        if self.gate_voltages and len(self.gate_voltages) != constants.BANK_SIZE:
            raise ConfigError(
                f"bank.gate_voltages must be empty or have exactly {constants.BANK_SIZE} "
                f"entries, got {len(self.gate_voltages)}"
            )
        for spec, v_gs in zip(self.resistors, self.gate_voltages):
            spec.regated(v_gs)

        nominal = [spec.on_resistance for spec in self.resistors]
        if any(b <= a for a, b in zip(nominal, nominal[1:])):
            raise ConfigError(
                f"bank on-resistances must be strictly increasing, got {nominal}"
            )
        base = nominal[0]
        for k, r_on in enumerate(nominal):
            decade = base * 10 ** k
            if abs(r_on - decade) > constants.ladder_tolerance * decade:
                raise ConfigError(
                    f"bank resistor {k} ({r_on:.6g} ohm) is more than "
                    f"{constants.ladder_tolerance:.0%} off the decade ladder "
                    f"value {decade:.6g} ohm"
                )

    def __len__(self) -> int:
        return len(self.resistors)

    def device(self, index: int) -> NmosResistorSpec:
        """Return the calibrated device at `index`"""
        spec = self.resistors[index]
        if self.gate_voltages:
            spec = spec.regated(self.gate_voltages[index])
        return replace(spec.trimmed(self.calibration[index]), index=index)

    def nominal_resistance(self, index: int) -> float:
        """Trimmed small-signal on-resistance, the value a decoder tables"""
        return self.device(index).on_resistance

    def resistance(self, index: int, v_ds: float) -> float:
        """Resistance the bottom node sees at `v_ds`"""
        if self.linear_mode:
            return self.nominal_resistance(index)
        return nmos_resistor.effective_resistance(self.device(index), v_ds)

    def current(self, index: int, v_ds: float) -> float:
        if self.linear_mode:
            return v_ds / self.nominal_resistance(index)
        return nmos_resistor.triode_current(self.device(index), v_ds)

    def voltage_for_current(self, index: int, current: float) -> float:
        """Bottom voltage developed when `current` is forced into resistor `index`"""
        if self.linear_mode:
            if current < 0:
                raise TriodeDomainError(f"negative current {current!r} A", index=index)
            return current * self.nominal_resistance(index)
        return nmos_resistor.voltage_for_current(self.device(index), current)

    def with_calibration(self, calibration: Tuple[float, ...]) -> BankConfig:
        return replace(self, calibration=tuple(calibration))


def decade_bank(
    base_resistance: float = constants.base_resistance,
    *,
    threshold_voltage: float = constants.threshold_voltage,
    gate_voltage: float = constants.gate_voltage,
    calibration: Tuple[float, ...] = (1.0,) * constants.BANK_SIZE,
    linear_mode: bool = False,
) -> BankConfig:
    """Build an exact decade ladder starting at `base_resistance`"""
    return bank_from_resistances(
        [base_resistance * 10 ** k for k in range(constants.BANK_SIZE)],
        threshold_voltage=threshold_voltage,
        gate_voltage=gate_voltage,
        calibration=calibration,
        linear_mode=linear_mode,
    )


def bank_from_resistances(
    on_resistances,
    *,
    threshold_voltage: float,
    gate_voltage: float,
    calibration: Tuple[float, ...] = (1.0,) * constants.BANK_SIZE,
    linear_mode: bool = False,
    gate_voltages: Tuple[float, ...] = (),
) -> BankConfig:
    resistors = tuple(
        NmosResistorSpec(
            on_resistance=float(r_on),
            threshold_voltage=threshold_voltage,
            gate_voltage=gate_voltage,
            index=k,
        )
        for k, r_on in enumerate(on_resistances)
    )
    return BankConfig(
        resistors=resistors,
        calibration=tuple(calibration),
        linear_mode=linear_mode,
        gate_voltages=tuple(gate_voltages),
    )
