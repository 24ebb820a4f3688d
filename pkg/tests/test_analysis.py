import numpy as np
import pytest

from analysis import (
    BaselineSpec,
    LINEARITY_DISTRIBUTION_COLUMNS,
    Spacing,
    SweepSpec,
    SweepVariable,
    linearity_distribution,
    lock_domains,
    monte_carlo,
    roundtrip_error,
    sweep_conversion,
    sweep_full_range,
    sweep_linearity,
)
from autorange import autorange_system
from exceptions import ConfigError
from pipeline import read_out
from setup_system import MonteCarloConfig

CONDUCTANCE_GRID = SweepSpec(SweepVariable.CONDUCTANCE, 100e-9, 5e-3, 200)
FULL_RANGE = SweepSpec(SweepVariable.CURRENT, 20e-9, 2e-3, 500)
ROUNDTRIP = SweepSpec(SweepVariable.CURRENT, 25e-9, 1.8e-3, 500)


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(SweepVariable.CURRENT, 1e-3, 1e-6, 10)
    with pytest.raises(ConfigError):
        SweepSpec(SweepVariable.CURRENT, 1e-6, 1e-3, 1)
    with pytest.raises(ConfigError):
        SweepSpec(SweepVariable.CURRENT, 0.0, 1e-3, 10)
    linear = SweepSpec(SweepVariable.CURRENT, 0.0, 1e-3, 11, Spacing.LINEAR)
    assert linear.values()[5] == pytest.approx(0.5e-3)
    with pytest.raises(ConfigError):
        BaselineSpec(index=5)


def test_sweeps_check_their_variable(cfg):
    with pytest.raises(ConfigError):
        sweep_conversion(FULL_RANGE, cfg)
    with pytest.raises(ConfigError):
        sweep_full_range(CONDUCTANCE_GRID, cfg)


def test_conversion_stays_in_the_window(cfg):
    frame = sweep_conversion(CONDUCTANCE_GRID, cfg)
    locked = frame[frame["status"] == "Locked"]
    assert len(locked) == len(frame)
    assert locked["v_bottom_auto_V"].min() >= 2.9e-3
    assert locked["v_bottom_auto_V"].max() <= 36e-3
    assert locked["in_window"].all()
    assert frame["v_bottom_auto_V"].iloc[0] == pytest.approx(3.124e-3, rel=1e-3)


def test_baseline_leaves_the_window_on_both_ends(cfg):
    frame = sweep_conversion(CONDUCTANCE_GRID, cfg)
    assert frame["v_bottom_baseline_V"].iloc[0] == pytest.approx(3.17e-6, rel=1e-2)
    assert frame["v_bottom_baseline_V"].iloc[0] <= 10e-6
    assert frame["v_bottom_baseline_V"].iloc[-1] == pytest.approx(89.1e-3, rel=1e-2)
    assert frame["v_bottom_baseline_V"].iloc[-1] >= 80e-3


def test_autoranged_never_worse_than_baseline_on_its_own_side(cfg):
    frame = sweep_conversion(CONDUCTANCE_GRID, cfg)
    index = frame["range_onehot"].map(lambda code: len(code) - 1 - code.index("1"))
    shared = frame[index <= BaselineSpec().index]
    assert len(shared) > 0
    assert (shared["v_bottom_auto_V"] <= shared["v_bottom_baseline_V"]).all()
    last = frame.iloc[-1]
    assert last["v_bottom_baseline_V"] / last["v_bottom_auto_V"] >= 2.5


def test_linearity_deviation(cfg):
    frame = sweep_linearity(CONDUCTANCE_GRID, cfg)
    assert frame["auto_deviation"].max() <= 0.18
    v_bottom = sweep_conversion(CONDUCTANCE_GRID, cfg)["v_bottom_auto_V"]
    assert np.allclose(frame["auto_deviation"], v_bottom / cfg.v_read, rtol=1e-9)
    assert frame["baseline_deviation"].iloc[-1] == pytest.approx(0.445, abs=0.01)
    assert (frame["envelope_low_A"] > frame["envelope_high_A"]).all()


def test_linearity_vanishes_with_conductance(cfg):
    frame = sweep_linearity(SweepSpec(SweepVariable.CONDUCTANCE, 1e-9, 3e-9, 5), cfg)
    assert frame["auto_deviation"].max() < 1e-3
    assert frame["baseline_deviation"].max() < 1e-3


@pytest.mark.parametrize("sweep", [sweep_conversion, sweep_linearity])
def test_conductance_outside_validity_window_is_a_row(cfg, sweep):
    frame = sweep(SweepSpec(SweepVariable.CONDUCTANCE, 1e-10, 5e-3, 5), cfg)
    assert len(frame) == 5
    assert frame["error"].iloc[0].startswith("ConfigError")
    assert (frame["error"].iloc[1:] == "").all()
    assert (frame["status"].iloc[1:] != "").all()


def test_full_range_sweep(cfg):
    frame = sweep_full_range(FULL_RANGE, cfg)
    assert (frame["status"] == "Locked").all()
    assert frame["v_out_V"].min() >= 0.1573
    assert frame["v_out_V"].max() <= 1.21
    assert frame["range_onehot"].nunique() == 5
    assert frame["v_out_V"].iloc[0] == pytest.approx(0.1605, rel=0.10)
    assert frame["v_out_V"].iloc[-1] == pytest.approx(1.205, rel=0.10)

    index = frame["range_onehot"].map(lambda code: len(code) - 1 - code.index("1"))
    pairs = list(zip(-index, frame["code"]))
    assert all(b >= a for a, b in zip(pairs, pairs[1:]))
    assert (np.diff(frame["cycles"].astype(int)) <= 0).all()

    changed = np.array([a != b for a, b in zip(pairs, pairs[1:])])
    decoded = frame["decoded_A"].to_numpy()
    assert (np.diff(decoded)[changed] > 0).all()


def test_lock_domains(cfg):
    domains = lock_domains(cfg)
    assert [domain.index for domain in domains] == [0, 1, 2, 3, 4]
    assert domains[4].lower == pytest.approx(18.69e-9, rel=1e-3)
    assert domains[4].lower <= 20e-9 and domains[0].upper >= 2e-3
    for higher, lower in zip(domains, domains[1:]):
        assert lower.upper == higher.lower
        assert lower.upper / lower.lower == pytest.approx(10.0, rel=0.01)


def test_decade_step_at_each_domain_edge(cfg):
    common_mode = cfg.amp.common_mode
    for domain in lock_domains(cfg)[:4]:
        above = autorange_system(domain.lower * (1 + 1e-6), cfg)
        below = autorange_system(domain.lower * (1 - 1e-6), cfg)
        assert above.range.index == domain.index
        assert below.range.index == domain.index + 1
        ratio = (below.v_out - common_mode) / (above.v_out - common_mode)
        assert ratio == pytest.approx(10.0, rel=0.02)


def test_roundtrip_within_one_percent(cfg):
    summary = roundtrip_error(ROUNDTRIP, cfg)
    assert summary.max_error <= 0.01
    assert summary.p95_error <= summary.max_error


def test_roundtrip_quantisation_only(linear_cfg):
    summary = roundtrip_error(ROUNDTRIP, linear_cfg)
    bound = linear_cfg.adc.lsb / (2 * (0.1573 - 0.05654))
    assert bound == pytest.approx(0.001938, rel=1e-3)
    assert summary.max_error <= bound * (1 + 1e-9)


def test_roundtrip_agrees_with_a_single_read(cfg):
    summary = roundtrip_error(SweepSpec(SweepVariable.CURRENT, 355.66e-9, 1e-6, 2), cfg)
    assert summary.frame["relative_error"].iloc[0] == pytest.approx(
        read_out(355.66e-9, cfg).relative_error, rel=1e-12
    )


def test_monte_carlo_without_mismatch(cfg):
    quiet = MonteCarloConfig(
        trials=5, resistor_sigma=0.0, gain_sigma=0.0, vcm_sigma=0.0, capacitor_sigma=0.0
    )
    summary = monte_carlo(cfg, quiet, seed=1)
    assert summary.trials == 5
    assert summary.relative_spread == pytest.approx(0.0, abs=1e-12)
    assert summary.in_range_fraction == 1.0
    assert summary.trial_pass_fraction == 1.0
    assert summary.failures == 0


def test_monte_carlo_margin(cfg):
    summary = monte_carlo(cfg, n=1000, seed=0)
    assert summary.relative_spread == pytest.approx(0.20, abs=0.05)
    assert summary.in_range_fraction >= 0.99


def test_monte_carlo_prefix_is_stable(cfg):
    short = monte_carlo(cfg, n=20, seed=4)
    long = monte_carlo(cfg, n=40, seed=4)
    assert np.array_equal(short.samples, long.samples[:20], equal_nan=True)
    other = monte_carlo(cfg, n=20, seed=5)
    assert not np.array_equal(short.samples, other.samples, equal_nan=True)


def test_monte_carlo_converges(cfg):
    sigmas = MonteCarloConfig(resistor_sigma=0.05, gain_sigma=0.02, vcm_sigma=0.0, capacitor_sigma=0.0)
    n = 50
    small = monte_carlo(cfg, sigmas, n=n, seed=0).relative_spread
    large = monte_carlo(cfg, sigmas, n=4 * n, seed=0).relative_spread
    assert abs(small - large) / large <= 2 / np.sqrt(n)


def test_monte_carlo_frame(cfg):
    summary = monte_carlo(cfg, n=3, seed=0)
    frame = summary.frame()
    assert list(frame.columns) == ["trial", "input_A", "v_out_V"]
    assert len(frame) == 3 * len(summary.grid)


def test_linearity_distribution(small_cfg):
    frame = linearity_distribution(small_cfg, 0.01, n=3, seed=2)
    assert list(frame.columns) == LINEARITY_DISTRIBUTION_COLUMNS
    assert list(frame["trial"]) == [0, 1, 2]
    assert (frame["dnl_max"] > 0).all()
    ideal = linearity_distribution(small_cfg, 0.0, n=1)
    assert abs(ideal["inl_max"].iloc[0]) <= 1e-9
    assert abs(ideal["dnl_min"].iloc[0]) <= 1e-9
