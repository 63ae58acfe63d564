"""
Rotary-wing propulsion power model

Power as a function of forward speed is the sum of a blade-profile term, an
induced term and a parasite term. Hover power is the speed-zero value, and all
flight legs are flown at the maximum-range speed, the speed minimising energy
per metre travelled.
"""
import logging
import math
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np
from scipy.optimize import golden

from errors import DomainError
from search import bracket_minimum, refine_minimum

logger = logging.getLogger(__name__)

SPEED_LIMIT_MPS = 60.0
COARSE_STEP_MPS = 0.5


@dataclass(frozen=True)
class PropulsionParams:
    """
    Rotary-wing power-model coefficients

    The mass is carried for config fidelity only. It does not rescale the
    power coefficients; override those explicitly for another airframe.
    """
    blade_profile_power_W: float = 79.86
    induced_power_W: float = 88.63
    tip_speed_mps: float = 120.0
    mean_rotor_induced_velocity_mps: float = 4.03
    fuselage_drag_ratio: float = 0.6
    air_density_kg_m3: float = 1.225
    rotor_solidity: float = 0.05
    rotor_disc_area_m2: float = 0.503
    uav_mass_kg: float = 1.5

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"PropulsionParams.{f.name} must be > 0, got {value}")

    def scaled(self, factor: float) -> 'PropulsionParams':
        """Copy with every power term multiplied by factor"""
        return PropulsionParams(
            blade_profile_power_W=self.blade_profile_power_W * factor,
            induced_power_W=self.induced_power_W * factor,
            tip_speed_mps=self.tip_speed_mps,
            mean_rotor_induced_velocity_mps=self.mean_rotor_induced_velocity_mps,
            fuselage_drag_ratio=self.fuselage_drag_ratio * factor,
            air_density_kg_m3=self.air_density_kg_m3,
            rotor_solidity=self.rotor_solidity,
            rotor_disc_area_m2=self.rotor_disc_area_m2,
            uav_mass_kg=self.uav_mass_kg,
        )


def propulsion_power(params: PropulsionParams, speed: float) -> float:
    """
    Propulsion power in watts at a level forward speed in m/s.

    Raises:
        DomainError: If speed is negative or not finite
    """
    if not math.isfinite(speed) or speed < 0:
        raise DomainError(f"speed must be a finite value >= 0 m/s, got {speed}")

    v2 = speed * speed
    blade_profile = params.blade_profile_power_W * (1.0 + 3.0 * v2 / params.tip_speed_mps ** 2)

    # sqrt(1 + x^2) - x written as 1 / (sqrt(1 + x^2) + x), stable for large x
    x = v2 / (2.0 * params.mean_rotor_induced_velocity_mps ** 2)
    induced = params.induced_power_W * math.sqrt(1.0 / (math.sqrt(1.0 + x * x) + x))

    parasite = (0.5 * params.fuselage_drag_ratio * params.air_density_kg_m3
                * params.rotor_solidity * params.rotor_disc_area_m2 * speed ** 3)

    return blade_profile + induced + parasite


def hover_power(params: PropulsionParams) -> float:
    """Power drawn while hovering (speed zero)"""
    return propulsion_power(params, 0.0)


def energy_per_meter(params: PropulsionParams, speed: float) -> float:
    """Propulsion energy per metre travelled, J/m"""
    if speed <= 0:
        return math.inf
    return propulsion_power(params, speed) / speed


@lru_cache(maxsize=256)
def max_range_speed(params: PropulsionParams) -> float:
    """
    Speed minimising energy per metre, P(V)/V.

    A 0.5 m/s scan over (0, 60] brackets the minimum, then golden-section
    search refines it.

    Raises:
        SearchBracketError: If the scan minimum sits on the edge of the range
    """
    grid = np.arange(COARSE_STEP_MPS, SPEED_LIMIT_MPS + COARSE_STEP_MPS / 2, COARSE_STEP_MPS)
    objective = lambda v: energy_per_meter(params, v)
    brack = bracket_minimum(objective, grid)
    speed = float(golden(objective, brack=brack, tol=1e-10, maxiter=500))
    logger.debug(f"Maximum-range speed {speed:.4f} m/s (bracket {brack[0]:.1f}-{brack[2]:.1f})")
    return speed


@lru_cache(maxsize=256)
def min_power_speed(params: PropulsionParams) -> float:
    """Speed minimising propulsion power P(V) itself"""
    grid = np.arange(0.0, SPEED_LIMIT_MPS + COARSE_STEP_MPS / 2, COARSE_STEP_MPS)
    speed, _ = refine_minimum(lambda v: propulsion_power(params, max(v, 0.0)), grid)
    return speed


def cruise_power(params: PropulsionParams) -> float:
    """Propulsion power at the maximum-range speed"""
    return propulsion_power(params, max_range_speed(params))
