"""
Rotary-wing propulsion power model tests
"""
import math

import numpy as np
import pytest

from errors import DomainError
from propulsion import (
    PropulsionParams, energy_per_meter, hover_power, max_range_speed,
    min_power_speed, propulsion_power,
)

PARAMS = PropulsionParams()


def test_hover_power_is_power_at_zero_speed():
    assert hover_power(PARAMS) == propulsion_power(PARAMS, 0.0)
    assert hover_power(PARAMS) == pytest.approx(79.86 + 88.63)


def test_power_has_interior_minimum():
    """P(V) drops below hover power at moderate speed and climbs again"""
    v_min = min_power_speed(PARAMS)
    assert 0 < v_min < 60
    assert propulsion_power(PARAMS, v_min) < hover_power(PARAMS)
    assert propulsion_power(PARAMS, v_min) < propulsion_power(PARAMS, 40.0)


def test_max_range_speed_minimises_energy_per_meter_on_fine_grid():
    v_mr = max_range_speed(PARAMS)
    grid = np.arange(0.01, 60.0 + 1e-9, 0.01)
    values = np.array([energy_per_meter(PARAMS, v) for v in grid])
    v_grid = grid[np.argmin(values)]

    assert abs(v_mr - v_grid) <= 0.01
    assert energy_per_meter(PARAMS, v_mr) <= values.min() + 1e-9


def test_min_power_speed_below_max_range_speed():
    assert min_power_speed(PARAMS) < max_range_speed(PARAMS)


def test_max_range_speed_in_plausible_band():
    assert 10.0 < max_range_speed(PARAMS) < 30.0


@pytest.mark.parametrize('speed', [-1.0, math.inf, math.nan])
def test_invalid_speed_raises(speed):
    with pytest.raises(DomainError):
        propulsion_power(PARAMS, speed)


def test_domain_error_is_value_error():
    with pytest.raises(ValueError):
        propulsion_power(PARAMS, -0.5)


def test_large_speed_stays_finite():
    """The induced term must not cancel catastrophically"""
    p = propulsion_power(PARAMS, 1e4)
    assert math.isfinite(p) and p > 0


def test_non_positive_parameter_rejected():
    with pytest.raises(ValueError):
        PropulsionParams(uav_mass_kg=0.0)


def test_scaled_params_scale_hover_power():
    assert hover_power(PARAMS.scaled(1.5)) == pytest.approx(1.5 * hover_power(PARAMS))


@pytest.mark.parametrize('factor', [0.5, 2.0])
def test_max_range_speed_ignores_common_power_scale(factor):
    assert max_range_speed(PARAMS.scaled(factor)) == pytest.approx(max_range_speed(PARAMS), abs=1e-6)
