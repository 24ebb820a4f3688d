"""Handle loading and assembly of read-out system configurations."""
from __future__ import annotations

import configparser
import io
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

import constants
from capacitor_array import Architecture
from components.amplifier import AmplifierSpec
from components.comparator import ComparatorSpec
from components.resistor_bank import BankConfig, bank_from_resistances
import device_factories
from exceptions import ConfigError
from sar_adc import AdcConfig

logger = logging.getLogger(__name__)

# Sidecar metadata section, never part of a system description
RUN_SECTION = "run"


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = constants.mc_trials
    resistor_sigma: float = constants.mc_resistor_sigma
    gain_sigma: float = constants.mc_gain_sigma
    vcm_sigma: float = constants.mc_vcm_sigma # volts, additive
    capacitor_sigma: float = constants.mc_capacitor_sigma

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"montecarlo.trials must be >= 1, got {self.trials}")
        for name in ("resistor_sigma", "gain_sigma", "vcm_sigma", "capacitor_sigma"):
            if getattr(self, name) < 0:
                raise ConfigError(f"montecarlo.{name} must be >= 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class SystemConfig:
    v_read: float = constants.v_read
    bank: BankConfig = device_factories.nominal_bank
    amp: AmplifierSpec = device_factories.sc_amplifier
    cmp: ComparatorSpec = device_factories.adc_threshold_comparator
    adc: AdcConfig = field(default_factory=AdcConfig)
    selector_clock: float = constants.selector_clock
    sar_clock: float = constants.sar_clock
    adc_sampling: float = constants.adc_sampling
    montecarlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)

    def __post_init__(self) -> None:
        if not self.v_read > 0:
            raise ConfigError(f"readout.v_read must be > 0, got {self.v_read!r}")
        for name in ("selector_clock", "sar_clock", "adc_sampling"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"timing.{name} must be > 0, got {getattr(self, name)!r}")

        low, high = self.amp.output_clip
        if not low <= self.cmp.threshold <= high:
            raise ConfigError(
                f"comparator threshold {self.cmp.threshold!r} V lies outside the "
                f"amplifier output window [{low!r}, {high!r}] V"
            )
        if self.cmp.threshold < self.adc.input_range[0]:
            logger.warning(
                "comparator threshold %.6g V sits below the ADC floor %.6g V",
                self.cmp.threshold, self.adc.input_range[0],
            )

        fastest = 1.0 / (1.0 / self.selector_clock + self.adc.bits / self.sar_clock)
        if fastest > self.adc_sampling * (1.0 + 1e-12):
            raise ConfigError(
                f"a one-cycle read-out runs at {fastest:.6g} Hz, faster than the "
                f"ADC sampling rate {self.adc_sampling:.6g} Hz"
            )


def default_system() -> SystemConfig:
    """Return the nominal read-out chain."""
    return SystemConfig()


#-------------------------#
#   INI <-> SYSTEMCONFIG  #
#-------------------------#

def _floats(values: Iterable[float]) -> str:
    return ", ".join(repr(float(v)) for v in values)


def config_to_sections(cfg: SystemConfig) -> Dict[str, Dict[str, str]]:
    """Every key of the configuration, floats in `repr` so they read back exactly"""
    device = cfg.bank.resistors[0]
    return {
        "readout": {"v_read": repr(cfg.v_read)},
        "bank": {
            "resistors": _floats(spec.on_resistance for spec in cfg.bank.resistors),
            "trims": _floats(cfg.bank.calibration),
            "threshold_voltage": repr(device.threshold_voltage),
            "gate_voltage": repr(device.gate_voltage),
            "gate_voltages": _floats(cfg.bank.gate_voltages),
            "linear_mode": str(cfg.bank.linear_mode).lower(),
        },
        "amplifier": {
            "gain": repr(cfg.amp.gain),
            "common_mode": repr(cfg.amp.common_mode),
            "gain_error": repr(cfg.amp.gain_error),
            "clip_low": repr(cfg.amp.output_clip[0]),
            "clip_high": repr(cfg.amp.output_clip[1]),
        },
        "comparator": {
            "threshold": repr(cfg.cmp.threshold),
            "offset": repr(cfg.cmp.offset),
        },
        "adc": {
            "bits": str(cfg.adc.bits),
            "v_lo": repr(cfg.adc.input_range[0]),
            "v_hi": repr(cfg.adc.input_range[1]),
            "v_ref": repr(cfg.adc.v_ref),
            "unit_capacitance": repr(cfg.adc.unit_capacitance),
            "architecture": str(cfg.adc.architecture),
        },
        "timing": {
            "selector_clock": repr(cfg.selector_clock),
            "sar_clock": repr(cfg.sar_clock),
            "adc_sampling": repr(cfg.adc_sampling),
        },
        "montecarlo": {
            "trials": str(cfg.montecarlo.trials),
            "resistor_sigma": repr(cfg.montecarlo.resistor_sigma),
            "gain_sigma": repr(cfg.montecarlo.gain_sigma),
            "vcm_sigma": repr(cfg.montecarlo.vcm_sigma),
            "capacitor_sigma": repr(cfg.montecarlo.capacitor_sigma),
        },
    }


def write_ini(sections: Mapping[str, Mapping[str, str]]) -> str:
    parser = _new_parser()
    parser.read_dict(sections)
    buffer = io.StringIO()
    parser.write(buffer)
    return buffer.getvalue()


def _new_parser() -> configparser.ConfigParser:
    return configparser.ConfigParser(interpolation=None)


def parse_override(text: str) -> Tuple[str, str, str]:
    """Split "section.key=value" into its three parts"""
    name, sep, value = text.partition("=")
    section, dot, key = name.strip().partition(".")
    if not sep or not dot or not section or not key:
        raise ConfigError(f"override {text!r} is not of the form section.key=value")
    return section.lower(), key.strip().lower(), value.strip()


def read_ini(path: str) -> configparser.ConfigParser:
    """Parse an INI file, reporting syntax errors with their line number"""
    parser = _new_parser()
    with open(path, encoding="utf-8") as f:
        text = f.read()
    try:
        parser.read_string(text, source=path)
    except (configparser.MissingSectionHeaderError, configparser.DuplicateSectionError,
            configparser.DuplicateOptionError) as exc:
        raise ConfigError(f"{path}, line {exc.lineno}: {exc.message}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{path}, line {lineno}: cannot parse {line.strip()!r}") from None
    return parser


def load_config(
    path: Optional[str] = None, overrides: Iterable[str] = ()
) -> SystemConfig:
    """
    Build a SystemConfig from an INI file and "section.key=value" overrides

    Every key defaults to the nominal system, so a missing or empty
    file yields it. The sidecar's [run] section is skipped.
    """
    values = config_to_sections(default_system())
    supplied = []
    if path is not None:
        parser = read_ini(path)
        for section in parser.sections():
            if section == RUN_SECTION:
                continue
            for key, value in parser.items(section):
                supplied.append((section, key, value, f"{path} [{section}]"))
    for text in overrides:
        section, key, value = parse_override(text)
        supplied.append((section, key, value, f"override {text!r}"))

    for section, key, value, where in supplied:
        if section not in values:
            raise ConfigError(f"{where}: unknown section {section!r}")
        if key not in values[section]:
            raise ConfigError(f"{where}: unknown key {section}.{key}")
        values[section][key] = value

    cfg = build_system(values)
    logger.info("configuration loaded from %s", path or "defaults")
    return cfg


def _parsed(values: Mapping[str, Mapping[str, str]], section: str, key: str,
            convert: Callable[[str], object]):
    text = values[section][key]
    try:
        return convert(text)
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot read {text!r}") from None


def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _boolean(text: str) -> bool:
    states = configparser.ConfigParser.BOOLEAN_STATES
    if text.strip().lower() not in states:
        raise ValueError(text)
    return states[text.strip().lower()]


def build_system(values: Mapping[str, Mapping[str, str]]) -> SystemConfig:
    """Assemble and validate the domain objects from string values"""
    def get(section: str, key: str, convert: Callable[[str], object] = float):
        return _parsed(values, section, key, convert)

    bank = bank_from_resistances(
        get("bank", "resistors", _float_list),
        threshold_voltage=get("bank", "threshold_voltage"),
        gate_voltage=get("bank", "gate_voltage"),
        calibration=get("bank", "trims", _float_list),
        linear_mode=get("bank", "linear_mode", _boolean),
        gate_voltages=get("bank", "gate_voltages", _float_list),
    )
    amp = AmplifierSpec(
        gain=get("amplifier", "gain"),
        common_mode=get("amplifier", "common_mode"),
        gain_error=get("amplifier", "gain_error"),
        output_clip=(get("amplifier", "clip_low"), get("amplifier", "clip_high")),
    )
    cmp = ComparatorSpec(
        threshold=get("comparator", "threshold"),
        offset=get("comparator", "offset"),
    )
    adc = AdcConfig(
        bits=get("adc", "bits", int),
        input_range=(get("adc", "v_lo"), get("adc", "v_hi")),
        v_ref=get("adc", "v_ref"),
        unit_capacitance=get("adc", "unit_capacitance"),
        architecture=Architecture.parse(values["adc"]["architecture"]),
    )
    montecarlo = MonteCarloConfig(
        trials=get("montecarlo", "trials", int),
        resistor_sigma=get("montecarlo", "resistor_sigma"),
        gain_sigma=get("montecarlo", "gain_sigma"),
        vcm_sigma=get("montecarlo", "vcm_sigma"),
        capacitor_sigma=get("montecarlo", "capacitor_sigma"),
    )
    return SystemConfig(
        v_read=get("readout", "v_read"),
        bank=bank,
        amp=amp,
        cmp=cmp,
        adc=adc,
        selector_clock=get("timing", "selector_clock"),
        sar_clock=get("timing", "sar_clock"),
        adc_sampling=get("timing", "adc_sampling"),
        montecarlo=montecarlo,
    )
