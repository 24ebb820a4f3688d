from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import constants
from exceptions import ConfigError, DomainError


@dataclass(frozen=True)
class AmplifierSpec:
    """
    Switched-capacitor gain stage as an ideal discrete-time affine map

    The two-phase charge suppression of the real stage only shows up
    through `gain_error`.
    """

    gain: float = constants.amplifier_gain
    common_mode: float = constants.common_mode
    gain_error: float = 0.0
    output_clip: Tuple[float, float] = (constants.clip_low, constants.clip_high)

    def __post_init__(self) -> None:
        if not self.gain > 0:
            raise ConfigError(f"amplifier.gain must be > 0, got {self.gain!r}")
        low, high = self.output_clip
        if not high > low:
            raise ConfigError(
                f"amplifier output clip must satisfy clip_low < clip_high, got {self.output_clip}"
            )

    @property
    def effective_gain(self) -> float:
        return self.gain * (1.0 + self.gain_error)


@dataclass(frozen=True)
class AmplifiedVoltage:
    voltage: float
    saturated: bool # True when the output was clamped to the clip window


def amplify(spec: AmplifierSpec, v_bottom: float) -> AmplifiedVoltage:
    """Return V_cm + A (1 + gain_error) v_bottom clamped to the output window"""
    if v_bottom < 0:
        raise DomainError(f"v_bottom must be >= 0, got {v_bottom!r}")
    low, high = spec.output_clip
    raw = spec.common_mode + spec.effective_gain * v_bottom
    clipped = min(max(raw, low), high)
    return AmplifiedVoltage(voltage=clipped, saturated=clipped != raw)
