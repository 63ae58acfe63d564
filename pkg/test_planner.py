"""
Planner tests: plan evaluation, heading search and the CPS / JP-CC / hover-only optimizers
"""
import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from computation import ComputeParams, computation_energy, gap_coefficient, residual_bits
from errors import ConstraintViolationError, InfeasibleScenarioError
from geometry_channel import (
    ChannelParams, Geometry, channel_power_gain, deviation_angle,
    distance_to_receiver, final_position,
)
from link import RadioParams, achievable_rate, transmission_phase
from planner import (
    DEFAULT_GRID, Plan, PlannerGrid, Scenario, evaluate_plan, optimize_cps,
    optimize_heading, optimize_hover_only, optimize_jpcc,
)
from propulsion import PropulsionParams, hover_power, max_range_speed, propulsion_power

logger = logging.getLogger(__name__)

DEFAULT_SWEEP = [float(b) for b in np.linspace(20e6, 200e6, 10)]
COARSE_GRID = PlannerGrid(compute_step_s=1.0, compute_max_s=4.0, fly_step_s=2.0, fly_max_s=20.0)


def shadowed_scenario(packet_bits: float = 100e6) -> Scenario:
    return Scenario(channel=ChannelParams(nlos_excess_loss_dB=35.0), packet_bits=packet_bits)


@pytest.fixture(scope='module')
def default_sweep():
    results = []
    for bits in DEFAULT_SWEEP:
        scenario = Scenario(packet_bits=bits)
        results.append((optimize_cps(scenario), optimize_jpcc(scenario)))
    return results


# ---------------------------------------------------------------------------
# evaluate_plan
# ---------------------------------------------------------------------------

def test_evaluate_plan_matches_module_recomposition():
    """Recomputing every phase from the model modules gives bit-identical results"""
    scenario = Scenario(packet_bits=80e6)
    plan = Plan(t_pre_s=1.25, t_wf_s=0.75, t_fly_s=3.5, heading_rad=0.4, tx_power_W=3.2)
    evaluation = evaluate_plan(scenario, plan)

    bits = residual_bits(scenario.compute, scenario.packet_bits, plan.t_pre_s)
    gap = gap_coefficient(scenario.compute, plan.t_wf_s)
    e_comp = computation_energy(scenario.compute, plan.t_pre_s, plan.t_wf_s)
    p_hover = hover_power(scenario.propulsion)
    e_hover_compute = p_hover * (plan.t_pre_s + plan.t_wf_s)
    speed = max_range_speed(scenario.propulsion)
    e_fly = propulsion_power(scenario.propulsion, speed) * plan.t_fly_s
    position = final_position(scenario.geometry, plan.heading_rad, speed, plan.t_fly_s)
    distance = distance_to_receiver(scenario.geometry, position)
    gain = channel_power_gain(scenario.channel, distance, deviation_angle(scenario.geometry, position))
    rate = achievable_rate(scenario.radio, plan.tx_power_W, gain, gap)
    t_tx, e_tx, e_hover_tx = transmission_phase(scenario.radio, bits, rate, plan.tx_power_W, p_hover)
    e_hover = e_hover_compute + e_hover_tx

    assert evaluation.residual_bits == bits
    assert evaluation.gap == gap
    assert evaluation.e_comp_J == e_comp
    assert evaluation.e_fly_J == e_fly
    assert evaluation.final_gain_dB == gain
    assert evaluation.rate_bps == rate
    assert evaluation.t_tx_s == t_tx
    assert evaluation.e_tx_J == e_tx
    assert evaluation.e_hover_J == e_hover
    assert evaluation.e_total_J == e_comp + e_fly + e_tx + e_hover
    assert evaluation.t_total_s == plan.t_pre_s + plan.t_wf_s + plan.t_fly_s + t_tx


def test_hover_plan_spends_no_computation_or_flight_energy():
    evaluation = evaluate_plan(Scenario(), Plan())
    assert evaluation.e_comp_J == 0.0
    assert evaluation.e_fly_J == 0.0
    assert evaluation.final_distance_m == pytest.approx(500.0)
    assert evaluation.feasible


def test_deadline_miss_reported_not_raised():
    evaluation = evaluate_plan(Scenario(packet_bits=1e9), Plan())
    assert not evaluation.feasible
    assert evaluation.t_total_s > 25.0


def test_vanishing_power_reported_infeasible():
    evaluation = evaluate_plan(Scenario(), Plan(tx_power_W=1e-320))
    assert evaluation.rate_bps == 0.0
    assert evaluation.t_tx_s == math.inf
    assert evaluation.t_total_s == math.inf
    assert not evaluation.feasible


def test_vanishing_power_with_nothing_to_send_takes_no_time():
    evaluation = evaluate_plan(Scenario(packet_bits=0.0), Plan(tx_power_W=1e-320))
    assert evaluation.t_tx_s == 0.0
    assert evaluation.e_tx_J == 0.0


def test_power_above_radio_maximum_rejected():
    scenario = Scenario(radio=RadioParams(max_tx_power_W=2.0))
    with pytest.raises(ConstraintViolationError):
        evaluate_plan(scenario, Plan(tx_power_W=3.0))


@pytest.mark.parametrize('kwargs', [
    {'t_pre_s': -0.1}, {'t_fly_s': -1.0}, {'tx_power_W': 0.0}, {'heading_rad': 4.0},
])
def test_invalid_plan_rejected(kwargs):
    with pytest.raises(ValueError):
        Plan(**kwargs)


# ---------------------------------------------------------------------------
# heading
# ---------------------------------------------------------------------------

def test_heading_without_flight_is_zero():
    assert optimize_heading(Scenario(), 0.0) == 0.0


def test_heading_beats_every_grid_heading():
    scenario = Scenario()
    t_fly = 10.0
    speed = max_range_speed(scenario.propulsion)

    def gain(heading):
        position = final_position(scenario.geometry, heading, speed, t_fly)
        return channel_power_gain(scenario.channel, distance_to_receiver(scenario.geometry, position),
                                  deviation_angle(scenario.geometry, position))

    best = optimize_heading(scenario, t_fly)
    assert -math.pi <= best <= math.pi
    grid_best = max(gain(math.radians(h)) for h in range(-180, 181))
    assert gain(best) >= grid_best - 1e-9


def test_ten_second_leg_turns_off_axis():
    """Deviating from the line of sight raises the LoS probability enough to pay for the extra distance"""
    assert optimize_heading(Scenario(), 10.0) > 0.0


def test_heading_tie_break_prefers_non_negative():
    """Gain is symmetric about the initial bearing, so the chosen heading is never negative"""
    for t_fly in (2.0, 10.0, 20.0):
        assert optimize_heading(Scenario(), t_fly) >= 0.0


# ---------------------------------------------------------------------------
# optimizers
# ---------------------------------------------------------------------------

def test_hover_only_neither_computes_nor_flies():
    plan, evaluation = optimize_hover_only(Scenario())
    assert (plan.t_pre_s, plan.t_wf_s, plan.t_fly_s) == (0.0, 0.0, 0.0)
    assert evaluation.feasible


def test_jpcc_has_no_computation_phase():
    plan, evaluation = optimize_jpcc(Scenario())
    assert plan.t_pre_s == 0.0 and plan.t_wf_s == 0.0
    assert evaluation.e_comp_J == 0.0
    assert evaluation.gap == pytest.approx(3.0)


def test_cps_collapses_to_jpcc_without_computation_gains():
    compute = ComputeParams(max_redundancy_fraction=0.0, gap_initial=1.0)
    scenario = Scenario(compute=compute)
    cps_plan, cps = optimize_cps(scenario)
    jpcc_plan, jpcc = optimize_jpcc(scenario)
    assert (cps_plan.t_pre_s, cps_plan.t_wf_s) == (0.0, 0.0)
    assert cps_plan == jpcc_plan
    assert cps.e_total_J == pytest.approx(jpcc.e_total_J, rel=1e-12)
    assert cps.t_total_s == pytest.approx(jpcc.t_total_s, rel=1e-12)


def test_optimal_plans_are_feasible_and_decompose(default_sweep):
    for (cps_plan, cps), (jpcc_plan, jpcc) in default_sweep:
        for evaluation in (cps, jpcc):
            assert evaluation.feasible
            assert evaluation.t_total_s <= 25.0 + 1e-9
            total = evaluation.e_comp_J + evaluation.e_fly_J + evaluation.e_tx_J + evaluation.e_hover_J
            assert evaluation.e_total_J == pytest.approx(total, rel=1e-12)


def test_cps_dominates_jpcc_on_default_sweep(default_sweep):
    for (_, cps), (_, jpcc) in default_sweep:
        assert cps.e_total_J <= jpcc.e_total_J
        assert cps.t_total_s <= jpcc.t_total_s


def test_energy_and_delay_nondecreasing_in_packet_length(default_sweep):
    for index in (0, 1):
        energies = [pair[index][1].e_total_J for pair in default_sweep]
        delays = [pair[index][1].t_total_s for pair in default_sweep]
        assert all(b >= a for a, b in zip(energies, energies[1:]))
        assert all(b >= a - 1e-9 for a, b in zip(delays, delays[1:]))


def test_cps_flies_no_longer_than_jpcc(default_sweep):
    for (cps_plan, _), (jpcc_plan, _) in default_sweep:
        assert cps_plan.t_fly_s <= jpcc_plan.t_fly_s


def test_shadowed_link_forces_baseline_to_fly():
    scenario = shadowed_scenario()
    with pytest.raises(InfeasibleScenarioError):
        optimize_hover_only(scenario)
    cps_plan, cps = optimize_cps(scenario)
    jpcc_plan, jpcc = optimize_jpcc(scenario)

    assert jpcc_plan.t_fly_s > 0
    assert cps_plan.t_fly_s < jpcc_plan.t_fly_s
    assert cps.e_total_J <= jpcc.e_total_J


def test_infeasible_scenario_carries_least_violating_plan():
    scenario = Scenario(packet_bits=200e6, delay_constraint_s=2.0)
    with pytest.raises(InfeasibleScenarioError) as excinfo:
        optimize_cps(scenario)
    assert excinfo.value.plan is not None
    assert not excinfo.value.evaluation.feasible
    assert excinfo.value.evaluation.t_total_s > 2.0


def test_fixed_max_power_variant_transmits_at_max():
    grid = replace(DEFAULT_GRID, optimize_power=False)
    plan, _ = optimize_cps(Scenario(), grid)
    assert plan.tx_power_W == 5.0


def test_power_optimization_never_costs_energy():
    scenario = Scenario(packet_bits=120e6)
    _, optimized = optimize_cps(scenario)
    _, fixed = optimize_cps(scenario, replace(DEFAULT_GRID, optimize_power=False))
    assert optimized.e_total_J <= fixed.e_total_J * (1 + 1e-12)


def _enumerate(scenario: Scenario, grid: PlannerGrid):
    """Every grid cell at maximum power, scored with evaluate_plan"""
    best = None
    for t_fly in grid.fly_times(scenario.delay_constraint_s):
        heading = optimize_heading(scenario, float(t_fly), grid)
        for t_pre in grid.compute_times():
            for t_wf in grid.compute_times():
                plan = Plan(float(t_pre), float(t_wf), float(t_fly), heading, scenario.radio.max_tx_power_W)
                evaluation = evaluate_plan(scenario, plan)
                if not evaluation.feasible:
                    continue
                key = (evaluation.e_total_J, evaluation.t_total_s, plan.t_fly_s)
                if best is None or key < best[0]:
                    best = (key, plan, evaluation)
    return best


ENUMERATION_SCENARIOS = [
    Scenario(packet_bits=40e6),
    Scenario(packet_bits=150e6),
    Scenario(packet_bits=200e6, delay_constraint_s=18.0),
    shadowed_scenario(60e6),
    Scenario(geometry=Geometry(initial_separation_m=800.0), packet_bits=80e6,
             compute=ComputeParams(cycles_per_redundant_bit=60.0)),
]


@pytest.mark.parametrize('scenario', ENUMERATION_SCENARIOS)
def test_cps_equals_exhaustive_enumeration(scenario):
    grid = replace(COARSE_GRID, optimize_power=False)
    _, _, expected = _enumerate(scenario, grid)
    plan, evaluation = optimize_cps(scenario, grid)
    assert evaluation.e_total_J == pytest.approx(expected.e_total_J, rel=1e-9)
    assert evaluation.t_total_s == pytest.approx(expected.t_total_s, rel=1e-9)


def _enumerate_with_power(scenario: Scenario, grid: PlannerGrid, powers: np.ndarray):
    """Lowest feasible energy over every grid cell and every listed power"""
    best = math.inf
    for t_fly in grid.fly_times(scenario.delay_constraint_s):
        heading = optimize_heading(scenario, float(t_fly), grid)
        for t_pre in grid.compute_times():
            for t_wf in grid.compute_times():
                for power in powers:
                    evaluation = evaluate_plan(
                        scenario, Plan(float(t_pre), float(t_wf), float(t_fly), heading, float(power))
                    )
                    if evaluation.feasible:
                        best = min(best, evaluation.e_total_J)
    return best


@pytest.mark.parametrize('scenario', [
    Scenario(packet_bits=40e6, delay_constraint_s=60.0),
    Scenario(packet_bits=100e6, delay_constraint_s=60.0),
    replace(shadowed_scenario(60e6), delay_constraint_s=60.0),
])
def test_power_search_no_worse_than_power_enumeration(scenario):
    powers = np.linspace(0.25, scenario.radio.max_tx_power_W, 20)
    expected = _enumerate_with_power(scenario, COARSE_GRID, powers)
    _, evaluation = optimize_cps(scenario, COARSE_GRID)
    assert COARSE_GRID.optimize_power
    assert evaluation.feasible
    assert evaluation.e_total_J <= expected * (1 + 1e-9)


def _random_scenario(rng: np.random.Generator) -> Scenario:
    def jitter(value):
        return float(value * rng.uniform(0.5, 1.5))

    return Scenario(
        geometry=Geometry(initial_separation_m=jitter(500.0)),
        channel=ChannelParams(los_excess_loss_dB=jitter(1.0), nlos_excess_loss_dB=jitter(20.0)),
        radio=RadioParams(bandwidth_Hz=jitter(2e6), max_tx_power_W=jitter(5.0)),
        compute=ComputeParams(cpu_frequency_Hz=jitter(1e9), energy_coefficient=jitter(1e-28),
                              cycles_per_redundant_bit=jitter(30.0)),
        propulsion=PropulsionParams().scaled(rng.uniform(0.5, 1.5)),
        packet_bits=jitter(100e6),
        delay_constraint_s=jitter(25.0),
    )


def test_cps_energy_dominates_on_random_scenarios():
    rng = np.random.default_rng(7)
    compared = slower = 0
    for _ in range(200):
        scenario = _random_scenario(rng)
        try:
            _, jpcc = optimize_jpcc(scenario, COARSE_GRID)
        except InfeasibleScenarioError:
            continue
        _, cps = optimize_cps(scenario, COARSE_GRID)
        assert cps.e_total_J <= jpcc.e_total_J
        if cps.t_total_s > jpcc.t_total_s:
            # energy is the objective; a CPS plan may take longer as long as it meets the deadline
            slower += 1
            assert cps.t_total_s <= scenario.delay_constraint_s + 1e-9
        compared += 1
    assert compared > 50
    logger.info(f"CPS slower than JP-CC in {slower} of {compared} scenarios")
