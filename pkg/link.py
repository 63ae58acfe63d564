"""
Link budget: noise power, gap-adjusted Shannon rate, transmission phase
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from errors import ConstraintViolationError, InfeasibleLinkError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadioParams:
    """Radio parameters of the sender"""
    bandwidth_Hz: float = 2e6
    noise_psd_dBm_per_Hz: float = -169.0
    max_tx_power_W: float = 5.0

    def __post_init__(self):
        if not self.bandwidth_Hz > 0:
            raise ValueError("bandwidth_Hz must be > 0")
        if not self.max_tx_power_W > 0:
            raise ValueError("max_tx_power_W must be > 0")


def noise_power(params: RadioParams) -> float:
    """Noise power over the channel bandwidth, W"""
    noise_dBm = params.noise_psd_dBm_per_Hz + 10.0 * math.log10(params.bandwidth_Hz)
    return 10.0 ** (noise_dBm / 10.0) / 1000.0


def snr(params: RadioParams, tx_power: float, gain_dB: float, gap: float = 1.0) -> float:
    """Gap-adjusted receive SNR (linear)"""
    return tx_power * 10.0 ** (gain_dB / 10.0) / (gap * noise_power(params))


def achievable_rate(params: RadioParams, tx_power: float, gain_dB: float, gap: float) -> float:
    """
    Achievable rate in bit/s under an SNR gap.

    The gap divides the SNR inside the logarithm.

    Raises:
        ConstraintViolationError: If tx_power is outside (0, max_tx_power_W] or gap < 1
    """
    if not 0 < tx_power <= params.max_tx_power_W:
        raise ConstraintViolationError(
            f"tx_power {tx_power} W outside (0, {params.max_tx_power_W}] W"
        )
    if not gap >= 1:
        raise ConstraintViolationError(f"gap coefficient must be >= 1, got {gap}")
    return params.bandwidth_Hz * math.log2(1.0 + snr(params, tx_power, gain_dB, gap))


def achievable_rate_array(params: RadioParams, tx_power: np.ndarray, gain_dB: np.ndarray,
                          gap: np.ndarray) -> np.ndarray:
    """Vectorised achievable_rate without range checks (planner inner loop)"""
    linear_gain = np.power(10.0, np.asarray(gain_dB, dtype=float) / 10.0)
    return params.bandwidth_Hz * np.log2(1.0 + tx_power * linear_gain / (gap * noise_power(params)))


def transmission_phase(params: RadioParams, bits: float, rate: float, tx_power: float,
                       hover_power: float) -> Tuple[float, float, float]:
    """
    Duration and energy of the transmit phase.

    The sender hovers while transmitting, so the phase is charged both the
    radio energy and the hover energy.

    Returns:
        (duration s, transmit energy J, hover energy J)

    Raises:
        InfeasibleLinkError: If rate <= 0
    """
    if not rate > 0:
        raise InfeasibleLinkError(f"link rate must be > 0 bit/s, got {rate}")
    if bits < 0:
        raise ValueError("bits must be >= 0")
    duration = bits / rate
    return duration, tx_power * duration, hover_power * duration
