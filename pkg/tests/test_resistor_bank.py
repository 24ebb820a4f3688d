import pytest

from components.resistor_bank import bank_from_resistances, decade_bank
from exceptions import ConfigError, TriodeDomainError


def test_decade_bank_ladder():
    bank = decade_bank()
    assert len(bank) == 5
    assert [bank.nominal_resistance(k) for k in range(5)] == pytest.approx(
        [15.86, 158.6, 1586.0, 15860.0, 158600.0]
    )


def test_bank_needs_exactly_five_entries():
    with pytest.raises(ConfigError, match="exactly 5 entries"):
        bank_from_resistances([15.86, 158.6, 1586.0, 15860.0], threshold_voltage=0.7, gate_voltage=4.2)


def test_bank_must_increase():
    with pytest.raises(ConfigError, match="strictly increasing"):
        bank_from_resistances(
            [15.86, 158.6, 1586.0, 1586.0, 158600.0], threshold_voltage=0.7, gate_voltage=4.2
        )


def test_bank_must_stay_near_decades():
    with pytest.raises(ConfigError, match="decade ladder"):
        bank_from_resistances(
            [15.86, 158.6, 1586.0, 25000.0, 158600.0], threshold_voltage=0.7, gate_voltage=4.2
        )


def test_trims_must_be_positive():
    with pytest.raises(ConfigError):
        decade_bank(calibration=(1.0, 1.0, 0.0, 1.0, 1.0))


def test_calibration_trims_the_device():
    bank = decade_bank().with_calibration((1.0, 1.0, 1.0, 1.05, 1.0))
    assert bank.nominal_resistance(3) == pytest.approx(1.05 * 15860.0)
    assert bank.device(3).on_resistance == pytest.approx(1.05 * 15860.0)
    assert bank.device(3).index == 3


def test_linear_mode_is_ohmic():
    bank = decade_bank(linear_mode=True)
    assert bank.voltage_for_current(2, 1e-6) == pytest.approx(1.586e-3, rel=1e-12)
    assert bank.current(2, 1.586e-3) == pytest.approx(1e-6, rel=1e-12)
    with pytest.raises(TriodeDomainError):
        bank.voltage_for_current(2, -1e-9)


def test_triode_mode_compresses():
    bank = decade_bank()
    assert bank.resistance(0, 0.03) > bank.nominal_resistance(0)


def test_gate_voltage_retunes_one_device():
    bank = decade_bank()
    tuned = bank_from_resistances(
        [15.86, 158.6, 1586.0, 15860.0, 158600.0],
        threshold_voltage=0.7,
        gate_voltage=4.2,
        gate_voltages=(4.2, 4.2, 4.2, 4.55, 4.2),
    )
    assert tuned.nominal_resistance(3) == pytest.approx(15860.0 * 3.5 / 3.85, rel=1e-12)
    assert tuned.device(3).gain_factor == pytest.approx(bank.device(3).gain_factor, rel=1e-12)
    assert tuned.nominal_resistance(2) == pytest.approx(bank.nominal_resistance(2), rel=1e-12)


def test_gate_voltages_need_five_entries_above_threshold():
    with pytest.raises(ConfigError, match="exactly 5 entries"):
        bank_from_resistances(
            [15.86, 158.6, 1586.0, 15860.0, 158600.0],
            threshold_voltage=0.7, gate_voltage=4.2, gate_voltages=(4.2, 4.2),
        )
    with pytest.raises(ConfigError):
        bank_from_resistances(
            [15.86, 158.6, 1586.0, 15860.0, 158600.0],
            threshold_voltage=0.7, gate_voltage=4.2, gate_voltages=(4.2, 4.2, 0.5, 4.2, 4.2),
        )
