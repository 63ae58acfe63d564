"""
On-board computation: data preprocessing and waveform decision making

Preprocessing spends CPU cycles eliminating redundant bits (up to a cap).
Waveform decision making spends cycles shrinking the gap coefficient between
the practical waveform's rate and Shannon capacity. The two tasks share one
CPU and run one after the other.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComputeParams:
    """CPU and computation-model parameters"""
    cpu_frequency_Hz: float = 1e9
    energy_coefficient: float = 1e-28
    cycles_per_redundant_bit: float = 30.0
    max_redundancy_fraction: float = 0.5
    gap_initial: float = 3.0
    gap_decay_cycles: float = 5e8

    def __post_init__(self):
        if not self.cpu_frequency_Hz > 0:
            raise ValueError("cpu_frequency_Hz must be > 0")
        if not self.energy_coefficient > 0:
            raise ValueError("energy_coefficient must be > 0")
        if not self.cycles_per_redundant_bit > 0:
            raise ValueError("cycles_per_redundant_bit must be > 0")
        if not 0 <= self.max_redundancy_fraction < 1:
            raise ValueError("max_redundancy_fraction must lie in [0, 1)")
        if not self.gap_initial >= 1:
            raise ValueError("gap_initial must be >= 1")
        if not self.gap_decay_cycles > 0:
            raise ValueError("gap_decay_cycles must be > 0")


def eliminated_bits(params: ComputeParams, packet_bits: float, t_pre: float) -> float:
    """
    Redundant bits removed by t_pre seconds of preprocessing.

    Capped at max_redundancy_fraction of the packet.
    """
    if t_pre < 0 or packet_bits < 0:
        raise ValueError("t_pre and packet_bits must be >= 0")
    removable = params.cpu_frequency_Hz * t_pre / params.cycles_per_redundant_bit
    return min(removable, params.max_redundancy_fraction * packet_bits)


def residual_bits(params: ComputeParams, packet_bits: float, t_pre: float) -> float:
    """Bits left to transmit after preprocessing"""
    return packet_bits - eliminated_bits(params, packet_bits, t_pre)


def residual_bits_array(params: ComputeParams, packet_bits: float, t_pre: np.ndarray) -> np.ndarray:
    """Vectorised residual_bits over many preprocessing times"""
    removable = params.cpu_frequency_Hz * np.asarray(t_pre, dtype=float) / params.cycles_per_redundant_bit
    return packet_bits - np.minimum(removable, params.max_redundancy_fraction * packet_bits)


def gap_coefficient(params: ComputeParams, t_wf: float) -> float:
    """
    Gap coefficient after t_wf seconds of waveform decision making.

    Decays exponentially in the assigned CPU cycles from gap_initial toward 1.
    """
    if t_wf < 0:
        raise ValueError("t_wf must be >= 0")
    cycles = params.cpu_frequency_Hz * t_wf
    return 1.0 + (params.gap_initial - 1.0) * math.exp(-cycles / params.gap_decay_cycles)


def gap_coefficient_array(params: ComputeParams, t_wf: np.ndarray) -> np.ndarray:
    """Vectorised gap_coefficient"""
    cycles = params.cpu_frequency_Hz * np.asarray(t_wf, dtype=float)
    return 1.0 + (params.gap_initial - 1.0) * np.exp(-cycles / params.gap_decay_cycles)


def computation_power(params: ComputeParams) -> float:
    """CPU power while computing, kappa * f^3 watts"""
    return params.energy_coefficient * params.cpu_frequency_Hz ** 3


def computation_energy(params: ComputeParams, t_pre: float, t_wf: float) -> float:
    """Energy spent on preprocessing plus waveform decision making, J"""
    if t_pre < 0 or t_wf < 0:
        raise ValueError("t_pre and t_wf must be >= 0")
    return computation_power(params) * (t_pre + t_wf)
