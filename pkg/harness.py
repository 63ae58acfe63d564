"""
Experiment harness

Command-line front end over the planner, DCF and orient modules:

    plan    score one scenario with every method
    sweep   CPS vs JP-CC over a list of packet lengths (CSV + summary)
    dcf     saturation throughput curves per station count (CSV)
    orient  classify a recorded or generated observation trace

Results are pandas DataFrames; CSV is written with a fixed column order and
float format so repeated runs of the same config are byte-identical.
"""
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from dotenv import load_dotenv

import config as config_module
from dcf import DcfParams, peak_throughput, saturation_throughput
from dcf_simulation import simulate_saturation_throughput
from errors import ConfigError, InfeasibleScenarioError, UavCpsError
from link import noise_power
from orient import OrientThresholds, orient, orient_task
from orient_traces import PROFILES, TraceRecord, generate_trace, load_trace, save_trace
from planner import (
    DEFAULT_GRID, Plan, PlanEvaluation, PlannerGrid, Scenario,
    optimize_cps, optimize_hover_only, optimize_jpcc,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    'method', 'packet_bits', 't_pre', 't_wf', 't_fly', 't_tx', 't_total',
    'e_comp', 'e_fly', 'e_tx', 'e_hover', 'e_total', 'heading_deg',
    'tx_power_W', 'final_distance_m', 'feasible',
]
FLOAT_FORMAT = '%.10g'

METHODS = {
    'CPS': optimize_cps,
    'JP-CC': optimize_jpcc,
    'hover-only': optimize_hover_only,
}


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"Wrote {len(df)} rows to {path}")
    return path


# ---------------------------------------------------------------------------
# plan / sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepSpec:
    """
    One packet-length sweep.

    Args:
        packet_bits_list: Packet lengths in bits, nonempty and strictly increasing
        scenario: Scenario shared by every row (its packet_bits is replaced per row)
        output_path: CSV destination; the summary goes next to it
        grid: Optimizer grid
        workers: Process count; rows are emitted in input order either way
        power_variants: Also run the fixed-max-power variant for the summary
    """
    packet_bits_list: List[float]
    scenario: Scenario = field(default_factory=Scenario)
    output_path: Optional[Path] = None
    grid: PlannerGrid = DEFAULT_GRID
    workers: int = 1
    power_variants: bool = False

    def __post_init__(self):
        if not self.packet_bits_list:
            raise ValueError("packet_bits_list must not be empty")
        if any(b <= a for a, b in zip(self.packet_bits_list, self.packet_bits_list[1:])):
            raise ValueError("packet_bits_list must be strictly increasing")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SweepResult:
    table: pd.DataFrame
    reductions: pd.DataFrame
    mean_energy_reduction_pct: float
    mean_delay_reduction_pct: float
    summary: str
    variant_reductions: Dict[str, Tuple[float, float]] = field(default_factory=dict)


def plan_row(method: str, packet_bits: float, plan: Plan, evaluation: PlanEvaluation) -> Dict:
    scores = evaluation.to_dict()
    return {
        'method': method,
        'packet_bits': packet_bits,
        't_pre': plan.t_pre_s,
        't_wf': plan.t_wf_s,
        't_fly': plan.t_fly_s,
        't_tx': scores['t_tx_s'],
        't_total': scores['t_total_s'],
        'e_comp': scores['e_comp_J'],
        'e_fly': scores['e_fly_J'],
        'e_tx': scores['e_tx_J'],
        'e_hover': scores['e_hover_J'],
        'e_total': scores['e_total_J'],
        'heading_deg': plan.heading_deg,
        'tx_power_W': plan.tx_power_W,
        'final_distance_m': scores['final_distance_m'],
        'feasible': scores['feasible'],
    }


def solve_method(method: str, scenario: Scenario, grid: PlannerGrid) -> Dict:
    """Run one optimizer; an infeasible scenario yields its least-violating plan marked infeasible"""
    try:
        plan, evaluation = METHODS[method](scenario, grid)
    except InfeasibleScenarioError as e:
        logger.warning(f"{method} infeasible at {scenario.packet_bits:.4g} bits: {e}")
        plan, evaluation = e.plan, replace(e.evaluation, feasible=False)
    return plan_row(method, scenario.packet_bits, plan, evaluation)


def _sweep_row(job: Tuple[Scenario, PlannerGrid, float]) -> List[Dict]:
    scenario, grid, packet_bits = job
    scenario = scenario.with_packet_bits(packet_bits)
    return [solve_method('CPS', scenario, grid), solve_method('JP-CC', scenario, grid)]


def _run_rows(spec: SweepSpec, grid: PlannerGrid) -> pd.DataFrame:
    jobs = [(spec.scenario, grid, float(b)) for b in spec.packet_bits_list]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as executor:
            rows = list(executor.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(job) for job in jobs]
    return pd.DataFrame([r for pair in rows for r in pair], columns=SWEEP_COLUMNS)


def reductions(table: pd.DataFrame) -> pd.DataFrame:
    """
    Relative energy and delay reduction of CPS over JP-CC per packet length, percent.

    Rows where either method is infeasible get NaN.
    """
    cps = table[table['method'] == 'CPS'].set_index('packet_bits')
    jpcc = table[table['method'] == 'JP-CC'].set_index('packet_bits')
    both = cps['feasible'] & jpcc['feasible']
    result = pd.DataFrame({
        'energy_reduction_pct': 100.0 * (jpcc['e_total'] - cps['e_total']) / jpcc['e_total'],
        'delay_reduction_pct': 100.0 * (jpcc['t_total'] - cps['t_total']) / jpcc['t_total'],
    })
    return result.where(both).reset_index()


def format_parameters(scenario: Scenario) -> str:
    radio, compute = scenario.radio, scenario.compute
    noise_dBm = 10.0 * np.log10(noise_power(radio) * 1000.0)
    lines = [
        f"distance            {scenario.geometry.initial_separation_m:g} m",
        f"bandwidth           {radio.bandwidth_Hz / 1e6:g} MHz",
        f"max tx power        {radio.max_tx_power_W:g} W",
        f"delay constraint    {scenario.delay_constraint_s:g} s",
        f"cpu frequency       {compute.cpu_frequency_Hz / 1e9:g} GHz",
        f"energy coefficient  {compute.energy_coefficient:g}",
        f"carrier frequency   {scenario.channel.carrier_frequency_Hz / 1e9:g} GHz",
        f"noise psd           {radio.noise_psd_dBm_per_Hz:g} dBm/Hz ({noise_dBm:.2f} dBm in band)",
    ]
    return '\n'.join(lines)


def format_summary(spec: SweepSpec, table: pd.DataFrame, reduction: pd.DataFrame,
                   variants: Dict[str, Tuple[float, float]]) -> str:
    feasible = table.groupby('method', sort=False)['feasible'].sum()
    rows = len(spec.packet_bits_list)
    slower = int((reduction['delay_reduction_pct'] < 0).sum())
    lines = [
        "=" * 60,
        "CPS vs JP-CC packet sweep",
        "=" * 60,
        format_parameters(spec.scenario),
        "",
        f"{'packet (Mbit)':>14} {'energy red. %':>14} {'delay red. %':>14}",
    ]
    for _, r in reduction.iterrows():
        lines.append(
            f"{r['packet_bits'] / 1e6:>14.1f} {r['energy_reduction_pct']:>14.2f} {r['delay_reduction_pct']:>14.2f}"
        )
    lines += [
        "",
        f"mean energy reduction  {reduction['energy_reduction_pct'].mean():.2f} %",
        f"mean delay reduction   {reduction['delay_reduction_pct'].mean():.2f} %",
        f"feasible rows          CPS {int(feasible.get('CPS', 0))}/{rows}, "
        f"JP-CC {int(feasible.get('JP-CC', 0))}/{rows}",
        f"CPS slower than JP-CC  {slower}/{rows} rows (plans minimise energy; delay only has to meet the deadline)",
    ]
    for name, (energy, delay) in variants.items():
        lines.append(f"{name:<22} energy {energy:.2f} %, delay {delay:.2f} %")
    return '\n'.join(lines) + '\n'


def run_sweep(spec: SweepSpec) -> SweepResult:
    """
    Run CPS and JP-CC at every packet length.

    A method that cannot meet the deadline at some packet length is recorded
    with feasible=False; the sweep carries on.
    """
    logger.info(f"Sweep over {len(spec.packet_bits_list)} packet lengths with {spec.workers} worker(s)")
    table = _run_rows(spec, spec.grid)
    reduction = reductions(table)

    variants: Dict[str, Tuple[float, float]] = {}
    if spec.power_variants:
        fixed = reductions(_run_rows(spec, replace(spec.grid, optimize_power=False)))
        variants['optimized power'] = (reduction['energy_reduction_pct'].mean(),
                                       reduction['delay_reduction_pct'].mean())
        variants['max power'] = (fixed['energy_reduction_pct'].mean(), fixed['delay_reduction_pct'].mean())

    summary = format_summary(spec, table, reduction, variants)
    if spec.output_path is not None:
        out = write_csv(table, spec.output_path)
        out.with_suffix('.summary.txt').write_text(summary)

    return SweepResult(
        table=table,
        reductions=reduction,
        mean_energy_reduction_pct=float(reduction['energy_reduction_pct'].mean()),
        mean_delay_reduction_pct=float(reduction['delay_reduction_pct'].mean()),
        summary=summary,
        variant_reductions=variants,
    )


def run_plan(scenario: Scenario, grid: PlannerGrid = DEFAULT_GRID,
             methods: Sequence[str] = ('hover-only', 'JP-CC', 'CPS')) -> pd.DataFrame:
    """One row per method for a single scenario"""
    rows = [solve_method(method, scenario, grid) for method in methods]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


# ---------------------------------------------------------------------------
# dcf
# ---------------------------------------------------------------------------

def run_dcf(params: DcfParams, tau_grid: Sequence[float], n_stations_list: Optional[Sequence[int]] = None,
            monte_carlo_slots: Optional[int] = None, seed: int = 0) -> pd.DataFrame:
    """
    Throughput curve per station count plus one peak row per count.

    Columns: n_stations, kind ('curve' or 'peak'), tau, throughput and, with
    monte_carlo_slots, throughput_mc from the slot-level simulation.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if n_stations_list is None:
        n_stations_list = [params.n_stations]

    rng = np.random.default_rng(seed)
    frames = []
    for n in n_stations_list:
        cell = replace(params, n_stations=int(n))
        curve = pd.DataFrame({
            'n_stations': cell.n_stations,
            'kind': 'curve',
            'tau': tau_grid,
            'throughput': np.atleast_1d(saturation_throughput(cell, tau_grid)),
        })
        if monte_carlo_slots:
            curve['throughput_mc'] = [
                simulate_saturation_throughput(cell, t, monte_carlo_slots, rng=rng) for t in tau_grid
            ]
        frames.append(curve)

        if cell.n_stations >= 2:
            tau_star, s_star = peak_throughput(cell)
            peak = {'n_stations': cell.n_stations, 'kind': 'peak', 'tau': tau_star, 'throughput': s_star}
            if monte_carlo_slots:
                peak['throughput_mc'] = np.nan
            frames.append(pd.DataFrame([peak]))
            logger.info(f"n={cell.n_stations}: peak S={s_star:.4f} at tau={tau_star:.4f}")
        else:
            logger.warning(f"n={cell.n_stations}: no interior peak, peak row skipped")

    return pd.concat(frames, ignore_index=True)


# ---------------------------------------------------------------------------
# orient
# ---------------------------------------------------------------------------

@dataclass
class OrientReport:
    orientations: pd.DataFrame
    confusion: Optional[pd.DataFrame] = None
    accuracy: Optional[float] = None


def run_orient(trace: Union[str, Path, Sequence[TraceRecord]],
               thresholds: OrientThresholds = OrientThresholds()) -> OrientReport:
    """
    Orient every record; with labels present, add a confusion table and accuracy.

    Args:
        trace: Path of a JSON trace file (read with load_trace) or records
            already in memory, e.g. from generate_trace
        thresholds: Decision thresholds

    Raises:
        TraceParseError: If a trace file cannot be read or parsed
    """
    records = load_trace(trace) if isinstance(trace, (str, Path)) else trace
    rows = []
    for i, record in enumerate(records):
        result = orient(record.observation, thresholds)
        rows.append({
            'record': i,
            'cause': result.cause.value,
            'issue_dimension': result.issue_dimension.value,
            'label': record.label.value if record.label is not None else None,
            'rationale': result.rationale,
        })
    df = pd.DataFrame(rows, columns=['record', 'cause', 'issue_dimension', 'label', 'rationale'])

    labelled = df[df['label'].notna()]
    if labelled.empty:
        return OrientReport(df)
    confusion = pd.crosstab(labelled['label'], labelled['cause'], rownames=['label'], colnames=['cause'])
    accuracy = float((labelled['label'] == labelled['cause']).mean())
    logger.info(f"Orientation accuracy {accuracy:.1%} over {len(labelled)} labelled records")
    return OrientReport(df, confusion, accuracy)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='JSON config (default: $UAVCPS_CONFIG or built-in defaults)')
    common.add_argument('--out', type=str, help='Output path (default under $UAVCPS_OUTPUT_DIR)')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='Override a config value, e.g. scenario.packet_bits=8e7 (repeatable)')
    common.add_argument('--seed', type=int, default=0, help='Seed for Monte Carlo and trace generation')
    common.add_argument('--verbose', '-v', action='store_true', help='Debug logging')

    parser = argparse.ArgumentParser(description='UAV compute-fly-transmit planner experiments')
    sub = parser.add_subparsers(dest='command', required=True)

    plan = sub.add_parser('plan', parents=[common], help='Plan one scenario with every method')
    plan.add_argument('--packet-bits', type=float, help='Packet length in bits')

    sweep = sub.add_parser('sweep', parents=[common], help='CPS vs JP-CC packet-length sweep')
    sweep.add_argument('--workers', type=int, help='Worker processes (default: sweep.workers)')
    sweep.add_argument('--power-variants', action='store_true',
                       help='Also report the fixed-max-power variant in the summary')

    dcf = sub.add_parser('dcf', parents=[common], help='DCF saturation throughput curves')
    dcf.add_argument('--monte-carlo', action='store_true', help='Add a slot-level simulation column')

    orient_cmd = sub.add_parser('orient', parents=[common], help='Classify an observation trace')
    source = orient_cmd.add_mutually_exclusive_group(required=True)
    source.add_argument('--trace', type=str, help='JSON trace file')
    source.add_argument('--profile', choices=sorted(PROFILES), help='Generate a scripted trace')
    orient_cmd.add_argument('--records', type=int, default=200, help='Records to generate (default: 200)')
    orient_cmd.add_argument('--save-trace', type=str, help='Write the generated trace to this file')
    return parser


def _output(args, default_name: str) -> Path:
    return Path(args.out) if args.out else config_module.output_dir() / default_name


def _cmd_plan(args, cfg: config_module.ExperimentConfig) -> int:
    scenario = cfg.scenario
    if args.packet_bits is not None:
        scenario = scenario.with_packet_bits(args.packet_bits)
    table = run_plan(scenario, cfg.grid)
    print(format_parameters(scenario))
    print(f"packet              {scenario.packet_bits / 1e6:g} Mbit\n")
    print(table.drop(columns=['packet_bits']).to_string(index=False))
    task = orient_task(scenario, cfg.grid)
    dimension = task.issue_dimension.value if task.feasible else 'none'
    print(f"\ntask orientation    {dimension} ({task.rationale})")
    if args.out:
        write_csv(table, Path(args.out))
    return 0 if table['feasible'].any() else 1


def _cmd_sweep(args, cfg: config_module.ExperimentConfig) -> int:
    spec = SweepSpec(
        packet_bits_list=cfg.packet_bits_list,
        scenario=cfg.scenario,
        output_path=_output(args, 'sweep.csv'),
        grid=cfg.grid,
        workers=args.workers or cfg.workers,
        power_variants=args.power_variants,
    )
    result = run_sweep(spec)
    print(result.summary)
    return 0


def _cmd_dcf(args, cfg: config_module.ExperimentConfig) -> int:
    slots = cfg.monte_carlo_slots if args.monte_carlo else None
    table = run_dcf(cfg.dcf_params, cfg.tau_grid, cfg.n_stations_list, slots, args.seed)
    write_csv(table, _output(args, 'dcf.csv'))
    print(table[table['kind'] == 'peak'].to_string(index=False))
    return 0


def _cmd_orient(args, cfg: config_module.ExperimentConfig) -> int:
    if args.trace:
        report = run_orient(args.trace, cfg.thresholds)
    else:
        records = generate_trace(args.profile, args.records, args.seed)
        if args.save_trace:
            save_trace(args.save_trace, records)
        report = run_orient(records, cfg.thresholds)
    if args.out:
        write_csv(report.orientations, Path(args.out))
    print(report.orientations['cause'].value_counts().to_string())
    if report.confusion is not None:
        print(f"\n{report.confusion.to_string()}\n\naccuracy {report.accuracy:.1%}")
    return 0


COMMANDS = {'plan': _cmd_plan, 'sweep': _cmd_sweep, 'dcf': _cmd_dcf, 'orient': _cmd_orient}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else config_module.log_level(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    try:
        cfg = config_module.load_config(args.config, args.overrides)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return 2
    except (UavCpsError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
