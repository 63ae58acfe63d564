"""
Slot-level Monte Carlo of a saturated DCF cell

Independent check of the analytic throughput: every station transmits in a
slot with probability tau, and the slot becomes idle, a success or a
collision depending on how many stations fired.
"""
import logging
from typing import Optional

import numpy as np

from dcf import DcfParams, slot_durations

logger = logging.getLogger(__name__)

DEFAULT_SLOTS = 1_000_000


def simulate_saturation_throughput(params: DcfParams,
                                   tau: float,
                                   slots: int = DEFAULT_SLOTS,
                                   seed: Optional[int] = 0,
                                   rng: Optional[np.random.Generator] = None) -> float:
    """
    Simulated normalised throughput over a number of slots.

    Args:
        params: Cell parameters
        tau: Per-slot transmission probability of every station
        slots: Number of simulated slots
        seed: Seed for a fresh generator (ignored when rng is given)
        rng: Generator to draw from, for sharing one stream across calls
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    transmitters = rng.binomial(params.n_stations, tau, size=slots)

    idle = np.count_nonzero(transmitters == 0)
    success = np.count_nonzero(transmitters == 1)
    collision = slots - idle - success

    t_success, t_collision = slot_durations(params)
    elapsed = idle * params.slot_time_s + success * t_success + collision * t_collision
    if elapsed == 0:
        return 0.0
    return success * params.payload_time_s / elapsed
