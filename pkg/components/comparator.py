from __future__ import annotations

from dataclasses import dataclass

import constants


@dataclass(frozen=True)
class ComparatorSpec:
    threshold: float = constants.comparator_threshold
    offset: float = 0.0


def compare(spec: ComparatorSpec, v_out: float) -> bool:
    """True iff v_out + offset reaches the threshold (boundary passes)"""
    return v_out + spec.offset >= spec.threshold
