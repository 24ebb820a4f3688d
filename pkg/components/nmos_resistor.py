"""NMOS transistor biased in triode, used as a switchable resistor."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from exceptions import ConfigError, TriodeDomainError


@dataclass(frozen=True)
class NmosResistorSpec:
    """
    Triode device described by its small-signal on-resistance

    The gain factor mu_n C_ox (W/L) follows from the on-resistance and the
    gate overdrive: k = [R_on (V_GS - V_TH)]^-1.
    """

    on_resistance: float # ohms at v_ds = 0
    threshold_voltage: float
    gate_voltage: float
    index: Optional[int] = None # position in the bank, used in error messages

    def __post_init__(self) -> None:
        if not self.gate_voltage > self.threshold_voltage:
            raise ConfigError(
                f"gate_voltage ({self.gate_voltage}) must exceed "
                f"threshold_voltage ({self.threshold_voltage})"
            )
        if not self.on_resistance > 0:
            raise ConfigError(f"on-resistance must be > 0, got {self.on_resistance!r}")

    @property
    def overdrive(self) -> float:
        return self.gate_voltage - self.threshold_voltage

    @property
    def gain_factor(self) -> float:
        """k in A/V^2"""
        return 1.0 / (self.on_resistance * self.overdrive)

    @property
    def max_current(self) -> float:
        """Largest current the device carries while still in triode"""
        return self.gain_factor * self.overdrive ** 2 / 2.0

    def trimmed(self, trim: float) -> NmosResistorSpec:
        """Return a copy whose on-resistance is scaled by `trim`"""
        return replace(self, on_resistance=self.on_resistance * trim)

    def regated(self, gate_voltage: float) -> NmosResistorSpec:
        """Same device (same k) driven at another V_GS; R_on follows 1 / (k V_ov)"""
        if not gate_voltage > self.threshold_voltage:
            raise ConfigError(
                f"gate_voltage ({gate_voltage}) must exceed "
                f"threshold_voltage ({self.threshold_voltage})"
            )
        overdrive = gate_voltage - self.threshold_voltage
        on_resistance = self.on_resistance * self.overdrive / overdrive
        return replace(self, on_resistance=on_resistance, gate_voltage=gate_voltage)


def _check_triode(spec: NmosResistorSpec, v_ds: float) -> None:
    if not 0.0 <= v_ds <= spec.overdrive:
        where = "" if spec.index is None else f"resistor {spec.index} "
        raise TriodeDomainError(
            f"{where}leaves triode: v_ds = {v_ds:.6g} V outside "
            f"[0, {spec.overdrive:.6g}] V",
            index=spec.index,
        )


def triode_current(spec: NmosResistorSpec, v_ds: float) -> float:
    """Drain current k[(V_GS - V_TH) v_ds - v_ds^2 / 2]"""
    _check_triode(spec, v_ds)
    return spec.gain_factor * (spec.overdrive * v_ds - v_ds * v_ds / 2.0)


def effective_resistance(spec: NmosResistorSpec, v_ds: float) -> float:
    """Large-signal resistance v_ds / I, continuous at v_ds = 0"""
    _check_triode(spec, v_ds)
    # v_ds / I simplified, so the v_ds = 0 limit needs no special case
    return 1.0 / (spec.gain_factor * (spec.overdrive - v_ds / 2.0))


def voltage_for_current(spec: NmosResistorSpec, current: float) -> float:
    """Invert the triode law: the v_ds at which the device carries `current`"""
    if current < 0:
        raise TriodeDomainError(f"negative current {current!r} A", index=spec.index)
    if current > spec.max_current:
        where = "" if spec.index is None else f"resistor {spec.index} "
        raise TriodeDomainError(
            f"{where}saturates: {current:.6g} A exceeds the triode limit "
            f"{spec.max_current:.6g} A",
            index=spec.index,
        )
    discriminant = spec.overdrive ** 2 - 2.0 * current / spec.gain_factor
    # Rationalised root, exact for currents many decades below the limit
    return (2.0 * current / spec.gain_factor) / (spec.overdrive + max(discriminant, 0.0) ** 0.5)
