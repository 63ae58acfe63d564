"""
Sender/receiver geometry and probability-weighted LoS/NLoS channel gain

Both UAVs sit on the same fixed-altitude plane, so all positions are 2-D.
The receiver never moves. The channel gain at a point depends on the
distance to the receiver (free-space loss) and on the deviation angle: the
angle at the receiver between the initial sender bearing and the current
one. Moving off the initial, shadowed bearing raises the line-of-sight
probability.

Functions accept numpy arrays as well as scalars; scalar inputs give floats.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from errors import DomainError, GeometryDegeneracyError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# 20*log10(4*pi/c) with c = 299792458 m/s
FSPL_CONSTANT_DB = -147.55


def _out(value) -> ArrayLike:
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class Geometry:
    """
    Initial placement of the sender and the (fixed) receiver.

    If receiver_position is omitted it is placed initial_separation_m along
    +x from the sender.
    """
    initial_separation_m: float = 500.0
    sender_position: Tuple[float, float] = (0.0, 0.0)
    receiver_position: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not self.initial_separation_m > 0:
            raise ValueError(f"initial_separation_m must be > 0, got {self.initial_separation_m}")
        sender = tuple(float(c) for c in self.sender_position)
        object.__setattr__(self, 'sender_position', sender)
        if self.receiver_position is None:
            receiver = (sender[0] + self.initial_separation_m, sender[1])
        else:
            receiver = tuple(float(c) for c in self.receiver_position)
            separation = math.hypot(receiver[0] - sender[0], receiver[1] - sender[1])
            if not math.isclose(separation, self.initial_separation_m, rel_tol=1e-9):
                raise ValueError(
                    f"receiver is {separation:.3f} m from sender but initial_separation_m "
                    f"is {self.initial_separation_m}"
                )
        object.__setattr__(self, 'receiver_position', receiver)

    @property
    def initial_bearing(self) -> float:
        """Direction of the sender->receiver segment, radians"""
        sx, sy = self.sender_position
        rx, ry = self.receiver_position
        return math.atan2(ry - sy, rx - sx)


@dataclass(frozen=True)
class ChannelParams:
    """Carrier and LoS/NLoS model parameters"""
    carrier_frequency_Hz: float = 5e9
    los_excess_loss_dB: float = 1.0
    nlos_excess_loss_dB: float = 20.0
    sigmoid_a: float = 15.0
    sigmoid_b: float = 0.12

    def __post_init__(self):
        if not self.carrier_frequency_Hz > 0:
            raise ValueError("carrier_frequency_Hz must be > 0")
        if not self.los_excess_loss_dB >= 0:
            raise ValueError("los_excess_loss_dB must be >= 0")
        if not self.nlos_excess_loss_dB > self.los_excess_loss_dB:
            raise ValueError("nlos_excess_loss_dB must exceed los_excess_loss_dB")
        if not (self.sigmoid_a > 0 and self.sigmoid_b > 0):
            raise ValueError("sigmoid_a and sigmoid_b must be > 0")


def final_position(geometry: Geometry, heading: ArrayLike, speed: float, duration: float) -> np.ndarray:
    """
    Sender position after flying a straight leg.

    Args:
        geometry: Initial placement
        heading: Radians, measured from the initial sender->receiver segment
        speed: m/s
        duration: s

    Returns:
        Array of shape (2,) for a scalar heading, (N, 2) for N headings
    """
    if duration < 0 or speed < 0:
        raise DomainError(f"speed and duration must be >= 0, got {speed}, {duration}")
    direction = geometry.initial_bearing + np.asarray(heading, dtype=float)
    leg = speed * duration
    sx, sy = geometry.sender_position
    return np.stack([sx + leg * np.cos(direction), sy + leg * np.sin(direction)], axis=-1)


def distance_to_receiver(geometry: Geometry, sender_pos: np.ndarray) -> ArrayLike:
    """Euclidean distance from sender position(s) to the receiver, m"""
    pos = np.asarray(sender_pos, dtype=float)
    rx, ry = geometry.receiver_position
    return _out(np.hypot(pos[..., 0] - rx, pos[..., 1] - ry))


def deviation_angle(geometry: Geometry, sender_pos: np.ndarray) -> ArrayLike:
    """
    Angle at the receiver between the initial and current sender bearings, degrees in [0, 180].

    Raises:
        GeometryDegeneracyError: If a sender position coincides with the receiver
    """
    pos = np.asarray(sender_pos, dtype=float)
    rx, ry = geometry.receiver_position
    sx, sy = geometry.sender_position
    ux, uy = sx - rx, sy - ry
    wx, wy = pos[..., 0] - rx, pos[..., 1] - ry
    if np.any((wx == 0) & (wy == 0)):
        raise GeometryDegeneracyError("sender position coincides with receiver")
    cross = np.abs(ux * wy - uy * wx)
    dot = ux * wx + uy * wy
    return _out(np.degrees(np.arctan2(cross, dot)))


def los_probability(params: ChannelParams, deviation: ArrayLike) -> ArrayLike:
    """Line-of-sight probability for a deviation angle in degrees"""
    theta = np.asarray(deviation, dtype=float)
    p = 1.0 / (1.0 + params.sigmoid_a * np.exp(-params.sigmoid_b * (theta - params.sigmoid_a)))
    return _out(np.clip(p, 0.0, 1.0))


def free_space_path_loss(distance: ArrayLike, frequency_Hz: float) -> ArrayLike:
    """Free-space path loss in dB"""
    d = np.asarray(distance, dtype=float)
    return _out(20.0 * np.log10(d) + 20.0 * np.log10(frequency_Hz) + FSPL_CONSTANT_DB)


def channel_power_gain(params: ChannelParams, distance: ArrayLike, deviation: ArrayLike) -> ArrayLike:
    """
    Expected channel power gain in dB (always <= 0 at practical ranges).

    Excess losses are weighted by the LoS probability in the dB domain.

    Raises:
        DomainError: If any distance is <= 0
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DomainError(f"distance must be > 0 m, got {distance}")
    p_los = np.asarray(los_probability(params, deviation))
    excess = p_los * params.los_excess_loss_dB + (1.0 - p_los) * params.nlos_excess_loss_dB
    return _out(-(np.asarray(free_space_path_loss(d, params.carrier_frequency_Hz)) + excess))
