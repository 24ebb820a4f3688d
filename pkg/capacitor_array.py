"""Binary-weighted and split-MSB capacitor DAC arrays at unit-capacitor level."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, NamedTuple, Sequence, Tuple, Union

import numpy as np

import constants
from exceptions import ConfigError, MismatchError


class Architecture(enum.Enum):
    CONVENTIONAL = "conventional"
    SPLIT_MSB = "split-msb"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, token: str) -> Architecture:
        try:
            return cls(token.strip().lower())
        except ValueError:
            choices = ", ".join(member.value for member in cls)
            raise ConfigError(f"unknown ADC architecture {token!r} (expected {choices})") from None


class CapRole(NamedTuple):
    """Where a switchable capacitor sits

    `group` is "main" for the binary array, "msb" for the split MSB replica.
    `bit` is the SAR bit (1 = MSB) it weighs, 0 for a dummy.
    """

    group: str
    bit: int


@dataclass(frozen=True, eq=False)
class CapArray:
    bits: int
    topology: Architecture
    unit_capacitance: float
    roles: Tuple[CapRole, ...]
    unit_counts: Tuple[int, ...]
    mismatch: np.ndarray # one multiplicative factor per unit capacitor

    def __post_init__(self) -> None:
        if self.mismatch.shape != (self.total_units,):
            raise ConfigError(
                f"mismatch needs {self.total_units} unit factors, got shape {self.mismatch.shape}"
            )
        if not np.all(self.capacitances > 0):
            raise ConfigError("all effective capacitances must be positive")

    @property
    def total_units(self) -> int:
        return sum(self.unit_counts)

    @property
    def nominal_weights(self) -> np.ndarray:
        """Nominal capacitance of each switchable capacitor (farads)"""
        return np.array(self.unit_counts, dtype=float) * self.unit_capacitance

    @cached_property
    def capacitances(self) -> np.ndarray:
        """Effective capacitance of each switchable capacitor (farads)"""
        edges = np.concatenate(([0], np.cumsum(self.unit_counts)))
        sums = np.add.reduceat(self.mismatch, edges[:-1])
        return sums * self.unit_capacitance

    @cached_property
    def position(self) -> Dict[CapRole, int]:
        return {role: k for k, role in enumerate(self.roles)}

    def unit_slice(self, position: int) -> slice:
        start = sum(self.unit_counts[:position])
        return slice(start, start + self.unit_counts[position])


def _build(bits: int, topology: Architecture, unit_capacitance: float) -> CapArray:
    if bits < 2:
        raise ConfigError(f"adc.bits must be >= 2, got {bits}")
    if not unit_capacitance > 0:
        raise ConfigError(f"adc.unit_capacitance must be > 0, got {unit_capacitance!r}")

    if topology is Architecture.CONVENTIONAL:
        roles = [CapRole("main", bit) for bit in range(1, bits + 1)]
        roles.append(CapRole("main", 0))
    else:
        # The MSB capacitor becomes a copy of everything below it
        roles = [CapRole("msb", bit) for bit in range(2, bits + 1)]
        roles.append(CapRole("msb", 0))
        roles += [CapRole("main", bit) for bit in range(2, bits + 1)]
        roles.append(CapRole("main", 0))

    counts = tuple(2 ** (bits - role.bit) if role.bit else 1 for role in roles)
    mismatch = np.ones(sum(counts))
    mismatch.flags.writeable = False
    return CapArray(
        bits=bits,
        topology=topology,
        unit_capacitance=unit_capacitance,
        roles=tuple(roles),
        unit_counts=counts,
        mismatch=mismatch,
    )


def build_array(
    bits: int, topology: Architecture, unit_capacitance: float = constants.unit_capacitance
) -> CapArray:
    """
    Nominal array of `topology`

    Conventional: {2^(bits-1), ..., 2, 1} units plus a one-unit dummy.
    Split-MSB: the MSB capacitor becomes a copy of the rest of the array.
    """
    return _build(bits, topology, unit_capacitance)


def _with_mismatch(array: CapArray, mismatch: np.ndarray) -> CapArray:
    mismatch = np.array(mismatch, dtype=float)
    mismatch.flags.writeable = False
    return replace(array, mismatch=mismatch)


def apply_mismatch(array: CapArray, sigma: float, seed: Union[int, Sequence[int]]) -> CapArray:
    """
    Multiply every unit capacitor by an independent N(1, sigma) draw

    Draws are a pure function of `seed`. Non-positive draws are redrawn up
    to MISMATCH_RETRIES times.
    """
    if sigma < 0:
        raise ConfigError(f"mismatch sigma must be >= 0, got {sigma!r}")
    if sigma == 0:
        return array

    rng = np.random.default_rng(seed)
    factors = array.mismatch * rng.normal(1.0, sigma, size=array.total_units)
    for _ in range(constants.MISMATCH_RETRIES):
        bad = factors <= 0
        if not bad.any():
            break
        factors[bad] = array.mismatch[bad] * rng.normal(1.0, sigma, size=int(bad.sum()))
    else:
        if np.any(factors <= 0):
            raise MismatchError(
                f"sigma {sigma} kept drawing non-positive capacitors after "
                f"{constants.MISMATCH_RETRIES} retries"
            )
    return _with_mismatch(array, factors)


def scale_capacitor(array: CapArray, position: int, factor: float) -> CapArray:
    """Scale every unit of one switchable capacitor by `factor`"""
    factors = array.mismatch.copy()
    factors[array.unit_slice(position)] *= factor
    return _with_mismatch(array, factors)
