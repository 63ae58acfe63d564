"""
Compute-fly-transmit planner

A plan assigns CPU time to preprocessing and waveform decision making, a
flight leg (duration and heading, flown at the maximum-range speed) and a
transmit power. evaluate_plan scores one plan phase by phase; the optimizers
search the joint space under the delay constraint:

- optimize_cps: computation, flight and power planned together
- optimize_jpcc: flight and power only (no computation phase)
- optimize_hover_only: power only, transmitting from the start position
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import golden

from computation import (
    ComputeParams, computation_energy, computation_power, gap_coefficient,
    gap_coefficient_array, residual_bits, residual_bits_array,
)
from errors import ConstraintViolationError, InfeasibleScenarioError
from geometry_channel import (
    ChannelParams, Geometry, channel_power_gain, deviation_angle,
    distance_to_receiver, final_position,
)
from link import RadioParams, achievable_rate, achievable_rate_array, transmission_phase
from propulsion import PropulsionParams, cruise_power, hover_power, max_range_speed, propulsion_power
from search import golden_minimize_array

logger = logging.getLogger(__name__)

FEASIBILITY_TOL_S = 1e-9
INFEASIBILITY_PENALTY_J_PER_S = 1e6
MIN_POWER_FRACTION = 1e-3


@dataclass(frozen=True)
class Scenario:
    """Complete problem instance"""
    geometry: Geometry = field(default_factory=Geometry)
    channel: ChannelParams = field(default_factory=ChannelParams)
    radio: RadioParams = field(default_factory=RadioParams)
    compute: ComputeParams = field(default_factory=ComputeParams)
    propulsion: PropulsionParams = field(default_factory=PropulsionParams)
    packet_bits: float = 50e6
    delay_constraint_s: float = 25.0

    def __post_init__(self):
        if not self.delay_constraint_s > 0:
            raise ValueError("delay_constraint_s must be > 0")
        if not self.packet_bits >= 0:
            raise ValueError("packet_bits must be >= 0")

    def with_packet_bits(self, packet_bits: float) -> 'Scenario':
        return replace(self, packet_bits=float(packet_bits))


@dataclass(frozen=True)
class Plan:
    """Decision vector of the compute-fly-transmit protocol"""
    t_pre_s: float = 0.0
    t_wf_s: float = 0.0
    t_fly_s: float = 0.0
    heading_rad: float = 0.0
    tx_power_W: float = 5.0

    def __post_init__(self):
        for name in ('t_pre_s', 't_wf_s', 't_fly_s'):
            if not getattr(self, name) >= 0:
                raise ValueError(f"Plan.{name} must be >= 0, got {getattr(self, name)}")
        if not -math.pi <= self.heading_rad <= math.pi:
            raise ValueError(f"Plan.heading_rad must lie in [-pi, pi], got {self.heading_rad}")
        if not self.tx_power_W > 0:
            raise ValueError(f"Plan.tx_power_W must be > 0, got {self.tx_power_W}")

    @property
    def heading_deg(self) -> float:
        return math.degrees(self.heading_rad)


@dataclass(frozen=True)
class PlanEvaluation:
    """Per-phase energies and durations of one plan"""
    e_comp_J: float
    e_fly_J: float
    e_tx_J: float
    e_hover_J: float
    e_total_J: float
    t_tx_s: float
    t_total_s: float
    residual_bits: float
    gap: float
    final_gain_dB: float
    final_distance_m: float
    rate_bps: float
    feasible: bool

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class PlannerGrid:
    """
    Search grid of the optimizers

    Computation times run 0..compute_max_s, flight times 0..min(fly_max_s, T).
    """
    compute_step_s: float = 0.25
    compute_max_s: float = 5.0
    fly_step_s: float = 0.5
    fly_max_s: float = 20.0
    heading_step_deg: float = 1.0
    power_iterations: int = 30
    optimize_power: bool = True
    refine_candidates: int = 8

    def __post_init__(self):
        if not (self.compute_step_s > 0 and self.fly_step_s > 0 and self.heading_step_deg > 0):
            raise ValueError("grid steps must be > 0")
        if not (self.compute_max_s >= 0 and self.fly_max_s >= 0):
            raise ValueError("grid limits must be >= 0")
        if self.power_iterations < 1 or self.refine_candidates < 1:
            raise ValueError("power_iterations and refine_candidates must be >= 1")

    def compute_times(self) -> np.ndarray:
        n = int(math.floor(self.compute_max_s / self.compute_step_s + 1e-9))
        return np.arange(n + 1) * self.compute_step_s

    def fly_times(self, delay_constraint_s: float) -> np.ndarray:
        limit = min(self.fly_max_s, delay_constraint_s)
        n = int(math.floor(limit / self.fly_step_s + 1e-9))
        return np.arange(n + 1) * self.fly_step_s


DEFAULT_GRID = PlannerGrid()


def evaluate_plan(scenario: Scenario, plan: Plan) -> PlanEvaluation:
    """
    Score a plan phase by phase: compute, fly, transmit.

    The sender hovers while computing and while transmitting. Infeasibility
    (deadline missed, no usable link) is reported in the evaluation, not raised.

    Raises:
        ConstraintViolationError: If the plan's transmit power exceeds the radio maximum
    """
    if plan.tx_power_W > scenario.radio.max_tx_power_W:
        raise ConstraintViolationError(
            f"tx_power {plan.tx_power_W} W exceeds max {scenario.radio.max_tx_power_W} W"
        )
    compute = scenario.compute
    p_hover = hover_power(scenario.propulsion)

    # compute
    bits = residual_bits(compute, scenario.packet_bits, plan.t_pre_s)
    gap = gap_coefficient(compute, plan.t_wf_s)
    e_comp = computation_energy(compute, plan.t_pre_s, plan.t_wf_s)
    e_hover_compute = p_hover * (plan.t_pre_s + plan.t_wf_s)

    # fly
    speed = max_range_speed(scenario.propulsion)
    e_fly = propulsion_power(scenario.propulsion, speed) * plan.t_fly_s
    position = final_position(scenario.geometry, plan.heading_rad, speed, plan.t_fly_s)
    distance = distance_to_receiver(scenario.geometry, position)

    # transmit
    if distance > 0:
        deviation = deviation_angle(scenario.geometry, position)
        gain = channel_power_gain(scenario.channel, distance, deviation)
        rate = achievable_rate(scenario.radio, plan.tx_power_W, gain, gap)
    else:
        # sender on top of the receiver: no usable link model
        gain, rate = math.inf, 0.0

    if rate > 0:
        t_tx, e_tx, e_hover_tx = transmission_phase(scenario.radio, bits, rate, plan.tx_power_W, p_hover)
    else:
        # rate underflows to 0 for vanishing power
        t_tx = math.inf if bits > 0 else 0.0
        e_tx, e_hover_tx = plan.tx_power_W * t_tx, p_hover * t_tx

    e_hover = e_hover_compute + e_hover_tx
    t_total = plan.t_pre_s + plan.t_wf_s + plan.t_fly_s + t_tx
    feasible = bool(rate > 0 and t_total <= scenario.delay_constraint_s + FEASIBILITY_TOL_S)

    return PlanEvaluation(
        e_comp_J=e_comp,
        e_fly_J=e_fly,
        e_tx_J=e_tx,
        e_hover_J=e_hover,
        e_total_J=e_comp + e_fly + e_tx + e_hover,
        t_tx_s=t_tx,
        t_total_s=t_total,
        residual_bits=bits,
        gap=gap,
        final_gain_dB=gain,
        final_distance_m=distance,
        rate_bps=rate,
        feasible=feasible,
    )


def _heading_order(step_deg: float) -> np.ndarray:
    """0, +s, -s, +2s, -2s, ..., 180: argmax over this order prefers small |heading|, then positive"""
    n = int(round(180.0 / step_deg))
    order = [0.0]
    for k in range(1, n + 1):
        order.append(k * step_deg)
        if k < n:
            order.append(-k * step_deg)
    return np.array(order)


def _gain_at_heading(geometry: Geometry, channel: ChannelParams, leg_m: float, heading_deg: float) -> float:
    position = final_position(geometry, math.radians(heading_deg), leg_m, 1.0)
    distance = distance_to_receiver(geometry, position)
    if distance <= 0:
        return -math.inf
    return channel_power_gain(channel, distance, deviation_angle(geometry, position))


@lru_cache(maxsize=8192)
def _best_heading(geometry: Geometry, channel: ChannelParams, leg_m: float, step_deg: float) -> float:
    headings = _heading_order(step_deg)
    positions = final_position(geometry, np.radians(headings), leg_m, 1.0)
    distances = np.asarray(distance_to_receiver(geometry, positions))
    valid = distances > 0
    gains = np.full(len(headings), -np.inf)
    gains[valid] = channel_power_gain(
        channel, distances[valid], deviation_angle(geometry, positions[valid])
    )

    i = int(np.argmax(gains))
    best = float(headings[i])
    objective = lambda h: -_gain_at_heading(geometry, channel, leg_m, h)
    best_gain = -objective(best)
    lo, hi = best - step_deg, best + step_deg

    if -objective(lo) < best_gain and -objective(hi) < best_gain:
        refined, neg_gain, _ = golden(objective, brack=(lo, best, hi), tol=1e-10, maxiter=100,
                                      full_output=True)
        if -neg_gain > best_gain:
            best = float(refined)
            best_gain = -neg_gain

    # the gain is symmetric about the initial bearing
    if best < 0 and -objective(-best) >= best_gain:
        best = -best

    # wrap into [-180, 180]
    best = (best + 180.0) % 360.0 - 180.0 if abs(best) > 180.0 else best
    return max(-math.pi, min(math.pi, math.radians(best)))


def optimize_heading(scenario: Scenario, t_fly: float, grid: PlannerGrid = DEFAULT_GRID) -> float:
    """
    Heading (radians) that maximises the channel gain after t_fly seconds at
    the maximum-range speed.

    A grid over [-180, 180] degrees is refined by golden-section search; ties
    go to the smaller |heading|, then to the non-negative one.
    """
    if t_fly < 0:
        raise ValueError("t_fly must be >= 0")
    leg = max_range_speed(scenario.propulsion) * t_fly
    return _best_heading(scenario.geometry, scenario.channel, leg, grid.heading_step_deg)


@dataclass
class _FlightLeg:
    t_fly: float
    heading: float
    gain_dB: float


def _flight_legs(scenario: Scenario, grid: PlannerGrid, fly_times: Sequence[float]) -> List[_FlightLeg]:
    legs = []
    speed = max_range_speed(scenario.propulsion)
    for t_fly in fly_times:
        heading = optimize_heading(scenario, float(t_fly), grid)
        position = final_position(scenario.geometry, heading, speed, float(t_fly))
        distance = distance_to_receiver(scenario.geometry, position)
        if distance > 0:
            gain = channel_power_gain(scenario.channel, distance, deviation_angle(scenario.geometry, position))
        else:
            gain = -math.inf
        legs.append(_FlightLeg(float(t_fly), heading, gain))
    return legs


def _solve(scenario: Scenario, grid: PlannerGrid, pre_times: np.ndarray, wf_times: np.ndarray,
           fly_times: np.ndarray, method: str) -> Tuple[Plan, PlanEvaluation]:
    """
    Grid search shared by every optimizer.

    All cells are scored at once with a vectorised power search; the best few
    are then re-scored with evaluate_plan, which is authoritative.
    """
    T = scenario.delay_constraint_s
    radio = scenario.radio
    p_max = radio.max_tx_power_W
    p_hover = hover_power(scenario.propulsion)
    p_fly = cruise_power(scenario.propulsion)
    p_comp = computation_power(scenario.compute)

    legs = _flight_legs(scenario, grid, fly_times)
    leg_gain = np.array([leg.gain_dB for leg in legs])

    i_pre, i_wf, i_fly = (a.ravel() for a in np.meshgrid(
        np.arange(len(pre_times)), np.arange(len(wf_times)), np.arange(len(legs)), indexing='ij'
    ))
    t_pre = pre_times[i_pre]
    t_wf = wf_times[i_wf]
    t_fly = np.asarray(fly_times, dtype=float)[i_fly]
    bits = residual_bits_array(scenario.compute, scenario.packet_bits, t_pre)
    gap = gap_coefficient_array(scenario.compute, t_wf)
    gain = leg_gain[i_fly]
    usable = np.isfinite(gain)
    gain = np.where(usable, gain, 0.0)

    base_time = t_pre + t_wf + t_fly
    base_energy = (p_comp + p_hover) * (t_pre + t_wf) + p_fly * t_fly

    def tx_time(power: np.ndarray) -> np.ndarray:
        rate = achievable_rate_array(radio, power, gain, gap)
        with np.errstate(divide='ignore', invalid='ignore'):
            t_tx = np.where(bits > 0, bits / rate, 0.0)
        return np.where(usable, t_tx, np.inf)

    def penalised(power: np.ndarray) -> np.ndarray:
        t_tx = tx_time(power)
        energy = base_energy + (power + p_hover) * t_tx
        overrun = np.maximum(base_time + t_tx - T, 0.0)
        return energy + INFEASIBILITY_PENALTY_J_PER_S * overrun

    ceiling = np.full(bits.shape, p_max)
    if grid.optimize_power:
        estimate = golden_minimize_array(
            penalised, np.full(bits.shape, MIN_POWER_FRACTION * p_max), ceiling, grid.power_iterations
        )
        power = np.where(penalised(ceiling) <= penalised(estimate), ceiling, estimate)
    else:
        power = ceiling

    t_tx = tx_time(power)
    t_total = base_time + t_tx
    energy = base_energy + (power + p_hover) * t_tx
    feasible = np.isfinite(t_total) & (t_total <= T + FEASIBILITY_TOL_S)
    logger.debug(f"{method}: {bits.size} cells, {int(feasible.sum())} feasible")

    def plan_for(cell: int) -> Plan:
        return Plan(
            t_pre_s=float(t_pre[cell]),
            t_wf_s=float(t_wf[cell]),
            t_fly_s=float(t_fly[cell]),
            heading_rad=legs[i_fly[cell]].heading,
            tx_power_W=float(power[cell]),
        )

    order = np.lexsort((t_fly, t_total, energy))
    ranked = order[feasible[order]]
    best: Optional[Tuple[Tuple[float, float, float], Plan, PlanEvaluation]] = None
    for start in range(0, len(ranked), grid.refine_candidates):
        for cell in ranked[start:start + grid.refine_candidates]:
            plan = plan_for(int(cell))
            evaluation = evaluate_plan(scenario, plan)
            if not evaluation.feasible:
                continue
            key = (evaluation.e_total_J, evaluation.t_total_s, plan.t_fly_s)
            if best is None or key < best[0]:
                best = (key, plan, evaluation)
        if best is not None:
            break

    if best is None:
        cell = int(np.argmin(penalised(power)))
        plan = plan_for(cell)
        evaluation = evaluate_plan(scenario, plan)
        logger.warning(
            f"{method}: no feasible plan for {scenario.packet_bits:.4g} bits; "
            f"least violating needs {evaluation.t_total_s:.3f} s of {T} s"
        )
        raise InfeasibleScenarioError(
            f"{method}: no plan meets the {T} s delay constraint "
            f"(best effort {evaluation.t_total_s:.3f} s)",
            plan=plan, evaluation=evaluation,
        )

    _, plan, evaluation = best
    logger.info(
        f"{method}: {scenario.packet_bits:.4g} bits -> {evaluation.e_total_J:.2f} J, "
        f"{evaluation.t_total_s:.3f} s (pre {plan.t_pre_s}, wf {plan.t_wf_s}, fly {plan.t_fly_s})"
    )
    return plan, evaluation


def optimize_cps(scenario: Scenario, grid: PlannerGrid = DEFAULT_GRID) -> Tuple[Plan, PlanEvaluation]:
    """
    Joint planning of computation, flight and transmission.

    Raises:
        InfeasibleScenarioError: If no grid plan meets the delay constraint
    """
    times = grid.compute_times()
    return _solve(scenario, grid, times, times, grid.fly_times(scenario.delay_constraint_s), 'CPS')


def optimize_jpcc(scenario: Scenario, grid: PlannerGrid = DEFAULT_GRID) -> Tuple[Plan, PlanEvaluation]:
    """
    Joint planning of communication and control only: no computation phase,
    so the full packet is sent at the initial gap coefficient.

    Raises:
        InfeasibleScenarioError: If no grid plan meets the delay constraint
    """
    zero = np.zeros(1)
    return _solve(scenario, grid, zero, zero, grid.fly_times(scenario.delay_constraint_s), 'JP-CC')


def optimize_hover_only(scenario: Scenario, grid: PlannerGrid = DEFAULT_GRID) -> Tuple[Plan, PlanEvaluation]:
    """
    Transmit from the initial position with no computation and no flight.

    Raises:
        InfeasibleScenarioError: If even the best transmit power misses the deadline
    """
    zero = np.zeros(1)
    return _solve(scenario, grid, zero, zero, zero, 'hover-only')
