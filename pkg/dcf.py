"""
802.11 DCF saturation throughput, basic access

The per-slot transmission probability tau is an input (the x-axis of the
throughput curve), not the fixed point of a backoff-window model. Given tau
and n saturated stations, a slot is idle, a success or a collision, and the
normalised throughput is the share of time spent carrying payload.
"""
import logging
from dataclasses import dataclass, fields
from typing import Tuple

import numpy as np

from errors import DomainError
from search import refine_maximum

logger = logging.getLogger(__name__)

PEAK_TOLERANCE = 1e-6


@dataclass(frozen=True)
class DcfParams:
    """MAC/PHY timing and size parameters of a saturated DCF cell"""
    n_stations: int = 10
    payload_bits: float = 8184.0
    mac_header_bits: float = 272.0
    phy_header_bits: float = 128.0
    ack_bits: float = 240.0
    channel_bit_rate_bps: float = 1e6
    slot_time_s: float = 50e-6
    sifs_s: float = 28e-6
    difs_s: float = 128e-6
    propagation_delay_s: float = 1e-6

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"DcfParams.{f.name} must be > 0")
        if int(self.n_stations) != self.n_stations or self.n_stations < 1:
            raise ValueError("n_stations must be an integer >= 1")
        object.__setattr__(self, 'n_stations', int(self.n_stations))

    @property
    def payload_time_s(self) -> float:
        return self.payload_bits / self.channel_bit_rate_bps


def slot_durations(params: DcfParams) -> Tuple[float, float]:
    """
    Busy-slot durations under basic access.

    Returns:
        (T_s, T_c): duration of a successful and of a collided transmission, s
    """
    rate = params.channel_bit_rate_bps
    header = (params.phy_header_bits + params.mac_header_bits) / rate
    payload = params.payload_time_s
    ack = params.ack_bits / rate
    delta = params.propagation_delay_s
    t_success = header + payload + params.sifs_s + delta + ack + params.difs_s + delta
    t_collision = header + payload + params.difs_s + delta
    return t_success, t_collision


def saturation_throughput(params: DcfParams, tau):
    """
    Normalised saturation throughput for transmission probability tau.

    Works on scalars and numpy arrays. Written in terms of the per-slot
    success probability n*tau*(1-tau)^(n-1) so tau = 0 and tau = 1 need no
    special case.

    Raises:
        DomainError: If any tau lies outside [0, 1]
    """
    t = np.asarray(tau, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise DomainError("tau must lie in [0, 1]")
    n = params.n_stations
    t_success, t_collision = slot_durations(params)

    p_idle = (1.0 - t) ** n
    p_success = n * t * (1.0 - t) ** (n - 1)
    p_collision = 1.0 - p_idle - p_success

    numerator = p_success * params.payload_time_s
    denominator = p_idle * params.slot_time_s + p_success * t_success + p_collision * t_collision
    s = numerator / denominator
    return float(s) if s.ndim == 0 else s


def peak_throughput(params: DcfParams, grid_step: float = 1e-3) -> Tuple[float, float]:
    """
    Transmission probability maximising throughput and the peak value.

    Raises:
        DomainError: If fewer than two stations contend (no interior peak)
    """
    if params.n_stations < 2:
        raise DomainError("peak_throughput needs n_stations >= 2")
    grid = np.arange(grid_step, 1.0, grid_step)
    tau, s = refine_maximum(lambda x: saturation_throughput(params, min(max(x, 0.0), 1.0)), grid,
                            tol=PEAK_TOLERANCE)
    logger.debug(f"DCF peak n={params.n_stations}: tau*={tau:.6f} S*={s:.6f}")
    return tau, s
