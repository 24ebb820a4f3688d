from dataclasses import replace

import pytest

from capacitor_array import Architecture
from components.comparator import ComparatorSpec
from exceptions import ConfigError
from setup_system import (
    MonteCarloConfig,
    SystemConfig,
    config_to_sections,
    default_system,
    load_config,
    parse_override,
    write_ini,
)


def write(tmp_path, text, name="system.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_empty_file_gives_the_default_system(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg == default_system()
    assert cfg.v_read == 0.2
    assert cfg.bank.nominal_resistance(0) == 15.86
    assert cfg.amp.gain == 34.0
    assert cfg.amp.common_mode == 0.05654
    assert cfg.cmp.threshold == 0.1573
    assert cfg.adc.input_range == (0.1, 1.7)
    assert cfg.adc.bits == 12
    assert cfg.adc.unit_capacitance == 30e-15
    assert cfg.adc.architecture is Architecture.SPLIT_MSB
    assert cfg.adc_sampling == 250e3


def test_ini_round_trips(tmp_path):
    cfg = load_config(overrides=["bank.trims=1, 1.1, 0.9, 1, 1", "amplifier.gain_error=0.01"])
    assert load_config(write(tmp_path, write_ini(config_to_sections(cfg)))) == cfg


def test_file_values_and_overrides(tmp_path):
    path = write(tmp_path, "[adc]\narchitecture = conventional\n[readout]\nv_read = 0.3\n")
    cfg = load_config(path, ["readout.v_read=0.25"])
    assert cfg.adc.architecture is Architecture.CONVENTIONAL
    assert cfg.v_read == 0.25


def test_per_device_gate_voltages(tmp_path):
    assert default_system().bank.gate_voltages == ()
    cfg = load_config(overrides=["bank.gate_voltages=4.2, 4.2, 4.3, 4.2, 4.2"])
    assert cfg.bank.gate_voltages == (4.2, 4.2, 4.3, 4.2, 4.2)
    assert cfg.bank.nominal_resistance(2) == pytest.approx(1586.0 * 3.5 / 3.6)
    assert load_config(write(tmp_path, write_ini(config_to_sections(cfg)))) == cfg


def test_run_section_is_ignored(tmp_path):
    path = write(tmp_path, "[run]\ncommand = trace\nseed = 3\n")
    assert load_config(path) == default_system()


@pytest.mark.parametrize(
    "text, message",
    [
        ("[bank]\nresistors = 4\n", "exactly 5 entries"),
        ("[bank]\ncolour = red\n", "unknown key bank.colour"),
        ("[display]\nwidth = 80\n", "unknown section"),
        ("[readout]\nv_read = fast\n", "readout.v_read"),
        ("[adc]\narchitecture = flash\n", "architecture"),
        ("[readout]\nv_read 0.2\n", "line 2"),
        ("v_read = 0.2\n", "line 1"),
    ],
)
def test_bad_files(tmp_path, text, message):
    with pytest.raises(ConfigError, match=message):
        load_config(write(tmp_path, text))


def test_unknown_override():
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(overrides=["adc.speed=1"])


@pytest.mark.parametrize("text", ["adc.bits", "bits=3", ".bits=3"])
def test_malformed_override(text):
    with pytest.raises(ConfigError):
        parse_override(text)


def test_missing_file_is_an_os_error(tmp_path):
    with pytest.raises(OSError):
        load_config(str(tmp_path / "absent.ini"))


def test_threshold_must_sit_in_the_amplifier_window(cfg):
    with pytest.raises(ConfigError):
        replace(cfg, cmp=ComparatorSpec(threshold=2.0))


def test_read_out_cannot_outrun_the_adc():
    with pytest.raises(ConfigError, match="sampling"):
        SystemConfig(adc_sampling=100e3)


def test_monte_carlo_config_validation():
    with pytest.raises(ConfigError):
        MonteCarloConfig(trials=0)
    with pytest.raises(ConfigError):
        MonteCarloConfig(gain_sigma=-0.1)
