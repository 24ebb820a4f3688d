from __future__ import annotations

from dataclasses import replace

import pytest

from sar_adc import AdcConfig
from setup_system import SystemConfig, default_system, load_config


@pytest.fixture
def cfg() -> SystemConfig:
    return default_system()


@pytest.fixture
def linear_cfg() -> SystemConfig:
    """Ideal resistors: only quantisation separates decode from input"""
    return load_config(overrides=["bank.linear_mode=true"])


@pytest.fixture
def small_cfg(cfg) -> SystemConfig:
    """A 6-bit converter, small enough for exhaustive checks"""
    return replace(cfg, adc=AdcConfig(bits=6))


@pytest.fixture
def adc3() -> AdcConfig:
    return AdcConfig(bits=3)
