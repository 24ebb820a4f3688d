import numpy as np
import pytest

from capacitor_array import (
    Architecture,
    CapRole,
    apply_mismatch,
    build_array,
    scale_capacitor,
)
from exceptions import ConfigError

C = 30e-15


def test_conventional_array_weights():
    array = build_array(3, Architecture.CONVENTIONAL)
    assert array.unit_counts == (4, 2, 1, 1)
    assert array.roles[-1] == CapRole("main", 0)
    assert array.capacitances.sum() == pytest.approx(8 * C)


def test_split_array_replaces_the_msb():
    array = build_array(3, Architecture.SPLIT_MSB)
    assert array.roles == (
        CapRole("msb", 2), CapRole("msb", 3), CapRole("msb", 0),
        CapRole("main", 2), CapRole("main", 3), CapRole("main", 0),
    )
    assert array.unit_counts == (2, 1, 1, 2, 1, 1)
    assert array.total_units == 8


@pytest.mark.parametrize("topology", list(Architecture))
def test_total_capacitance_matches_resolution(topology):
    array = build_array(12, topology, C)
    assert array.capacitances.sum() == pytest.approx(4096 * C)
    assert np.array_equal(array.capacitances, array.nominal_weights)


def test_architecture_parse():
    assert Architecture.parse(" Split-MSB ") is Architecture.SPLIT_MSB
    with pytest.raises(ConfigError):
        Architecture.parse("segmented")


def test_array_validation():
    with pytest.raises(ConfigError):
        build_array(1, Architecture.CONVENTIONAL)
    with pytest.raises(ConfigError):
        build_array(4, Architecture.CONVENTIONAL, unit_capacitance=0.0)


def test_zero_sigma_keeps_the_array():
    array = build_array(6, Architecture.CONVENTIONAL)
    assert apply_mismatch(array, 0.0, seed=3) is array


def test_mismatch_is_a_function_of_the_seed():
    array = build_array(6, Architecture.SPLIT_MSB)
    first = apply_mismatch(array, 0.01, seed=5)
    again = apply_mismatch(array, 0.01, seed=5)
    other = apply_mismatch(array, 0.01, seed=6)
    assert np.array_equal(first.mismatch, again.mismatch)
    assert not np.array_equal(first.mismatch, other.mismatch)
    assert np.all(first.mismatch > 0)


def test_negative_sigma():
    with pytest.raises(ConfigError):
        apply_mismatch(build_array(4, Architecture.CONVENTIONAL), -0.1, seed=0)


def test_scale_one_capacitor():
    array = build_array(4, Architecture.CONVENTIONAL)
    scaled = scale_capacitor(array, 0, 1.02)
    assert scaled.capacitances[0] == pytest.approx(8 * C * 1.02)
    assert np.array_equal(scaled.capacitances[1:], array.capacitances[1:])


def test_total_capacitance_spread_follows_unit_count():
    array = build_array(6, Architecture.CONVENTIONAL)
    totals = np.array(
        [apply_mismatch(array, 0.01, seed=seed).capacitances.sum() for seed in range(1000)]
    )
    relative_spread = totals.std() / totals.mean()
    assert relative_spread == pytest.approx(0.01 / np.sqrt(array.total_units), rel=0.2)
