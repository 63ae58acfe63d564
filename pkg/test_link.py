"""
Link budget tests
"""
import math

import numpy as np
import pytest

from errors import ConstraintViolationError, InfeasibleLinkError
from geometry_channel import ChannelParams, channel_power_gain
from link import RadioParams, achievable_rate, achievable_rate_array, noise_power, snr, transmission_phase

RADIO = RadioParams()
HOVER_GAIN_DB = channel_power_gain(ChannelParams(), 500.0, 0.0)


def test_noise_power_over_bandwidth():
    expected_dBm = -169.0 + 10.0 * math.log10(2e6)
    assert noise_power(RADIO) == pytest.approx(10 ** (expected_dBm / 10) / 1000)


def test_rate_is_gap_adjusted_shannon():
    rate = achievable_rate(RADIO, 5.0, HOVER_GAIN_DB, 3.0)
    expected = 2e6 * math.log2(1.0 + 5.0 * 10 ** (HOVER_GAIN_DB / 10) / (3.0 * noise_power(RADIO)))
    assert rate == pytest.approx(expected)


def test_default_hover_link_rate():
    assert snr(RADIO, 5.0, HOVER_GAIN_DB) == pytest.approx(190, rel=0.05)
    assert 14e6 < achievable_rate(RADIO, 5.0, HOVER_GAIN_DB, 1.0) < 16.5e6


def test_rate_increases_with_power_and_decreases_with_gap():
    powers = np.linspace(0.1, 5.0, 20)
    rates = [achievable_rate(RADIO, p, HOVER_GAIN_DB, 1.5) for p in powers]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert achievable_rate(RADIO, 5.0, HOVER_GAIN_DB, 2.0) < achievable_rate(RADIO, 5.0, HOVER_GAIN_DB, 1.0)


@pytest.mark.parametrize('power', [0.0, -1.0, 5.01])
def test_power_outside_range_rejected(power):
    with pytest.raises(ConstraintViolationError):
        achievable_rate(RADIO, power, HOVER_GAIN_DB, 1.0)


def test_gap_below_one_rejected():
    with pytest.raises(ConstraintViolationError):
        achievable_rate(RADIO, 1.0, HOVER_GAIN_DB, 0.9)


def test_array_rate_matches_scalar():
    powers = np.array([0.5, 1.0, 5.0])
    gaps = np.array([1.0, 2.0, 3.0])
    expected = [achievable_rate(RADIO, p, HOVER_GAIN_DB, g) for p, g in zip(powers, gaps)]
    assert np.allclose(achievable_rate_array(RADIO, powers, HOVER_GAIN_DB, gaps), expected)


def test_transmission_phase_charges_radio_and_hover():
    duration, e_tx, e_hover = transmission_phase(RADIO, 30e6, 15e6, 5.0, 168.0)
    assert duration == pytest.approx(2.0)
    assert e_tx == pytest.approx(10.0)
    assert e_hover == pytest.approx(336.0)


def test_zero_rate_is_infeasible():
    with pytest.raises(InfeasibleLinkError):
        transmission_phase(RADIO, 1e6, 0.0, 5.0, 168.0)
