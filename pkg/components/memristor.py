from __future__ import annotations

from dataclasses import dataclass

import constants
from exceptions import ConfigError


@dataclass(frozen=True)
class MemristorState:
    """Static conductance of the device under test during one read."""

    conductance: float # siemens

    def __post_init__(self) -> None:
        if not self.conductance > 0:
            raise ConfigError(
                f"memristor conductance must be > 0, got {self.conductance!r}"
            )
        if not constants.MIN_CONDUCTANCE <= self.conductance <= constants.MAX_CONDUCTANCE:
            raise ConfigError(
                f"memristor conductance {self.conductance:.6g} S outside the "
                f"validity window [{constants.MIN_CONDUCTANCE:g}, "
                f"{constants.MAX_CONDUCTANCE:g}] S"
            )

    @property
    def resistance(self) -> float:
        return 1.0 / self.conductance

    def current(self, v_read: float, v_bottom: float) -> float:
        """Current through the memristor with `v_read` on top and `v_bottom` below"""
        return (v_read - v_bottom) * self.conductance
