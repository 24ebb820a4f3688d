import pytest

from components.amplifier import AmplifierSpec, amplify
from components.comparator import ComparatorSpec, compare
from exceptions import ConfigError, DomainError


@pytest.mark.parametrize(
    "v_bottom, v_out",
    [(6.031e-3, 261.6e-3), (57.291e-6, 58.49e-3), (0.0, 56.54e-3)],
)
def test_amplify(v_bottom, v_out):
    assert amplify(AmplifierSpec(), v_bottom).voltage == pytest.approx(v_out, rel=1e-3)


def test_amplify_clamps_to_the_supply():
    out = amplify(AmplifierSpec(), 0.1)
    assert out.voltage == 1.8
    assert out.saturated


def test_gain_error_scales_gain():
    spec = AmplifierSpec(gain_error=0.1)
    assert spec.effective_gain == pytest.approx(37.4)
    assert not amplify(spec, 1e-3).saturated


def test_negative_bottom_voltage():
    with pytest.raises(DomainError):
        amplify(AmplifierSpec(), -1e-6)


def test_amplifier_validation():
    with pytest.raises(ConfigError):
        AmplifierSpec(gain=0.0)
    with pytest.raises(ConfigError):
        AmplifierSpec(output_clip=(1.8, 0.0))


def test_comparator_boundary_passes():
    cmp = ComparatorSpec()
    assert compare(cmp, 0.1573)
    assert not compare(cmp, 0.1572)
    assert compare(ComparatorSpec(offset=1e-3), 0.1564)


@pytest.mark.parametrize("gain_error", [0.0, 0.03, -0.05])
@pytest.mark.parametrize("a, b", [(0.0, 1e-3), (6.031e-3, 2e-2), (3e-3, 3.5e-2)])
def test_amplify_is_affine(gain_error, a, b):
    spec = AmplifierSpec(gain_error=gain_error)
    lhs = amplify(spec, a).voltage + amplify(spec, b).voltage - 2 * amplify(spec, 0.0).voltage
    assert lhs == pytest.approx(spec.gain * (1 + gain_error) * (a + b), rel=1e-12)
