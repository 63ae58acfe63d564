"""
Experiment configuration

One JSON document describes an experiment. Every field is optional; missing
fields fall back to the defaults below, which echo the model dataclasses.
Sections: scenario, planner, sweep, dcf, orient.

Overrides use dotted paths, e.g. ``scenario.channel.nlos_excess_loss_dB=35``
or ``sweep.packet_bits_list=[2e7,4e7]``; the value is parsed as JSON and
taken as a plain string when that fails.
"""
import copy
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from dotenv import load_dotenv

from computation import ComputeParams
from dcf import DcfParams
from errors import ConfigError
from geometry_channel import ChannelParams, Geometry
from link import RadioParams
from orient import OrientThresholds
from planner import PlannerGrid, Scenario
from propulsion import PropulsionParams

logger = logging.getLogger(__name__)

load_dotenv()

ENV_CONFIG = 'UAVCPS_CONFIG'
ENV_LOG_LEVEL = 'UAVCPS_LOG_LEVEL'
ENV_OUTPUT_DIR = 'UAVCPS_OUTPUT_DIR'

DEFAULT_PACKET_BITS = [float(b) for b in np.linspace(20e6, 200e6, 10)]
DEFAULT_TAU_POINTS = 101
DEFAULT_MONTE_CARLO_SLOTS = 1_000_000


def default_document() -> Dict[str, Any]:
    """Full config document with every default filled in"""
    geometry = asdict(Geometry())
    geometry['receiver_position'] = None
    return {
        'scenario': {
            'geometry': geometry,
            'channel': asdict(ChannelParams()),
            'radio': asdict(RadioParams()),
            'compute': asdict(ComputeParams()),
            'propulsion': asdict(PropulsionParams()),
            'packet_bits': Scenario.packet_bits,
            'delay_constraint_s': Scenario.delay_constraint_s,
        },
        'planner': asdict(PlannerGrid()),
        'sweep': {
            'packet_bits_list': list(DEFAULT_PACKET_BITS),
            'workers': 1,
        },
        'dcf': {
            'params': asdict(DcfParams()),
            'n_stations_list': [5, 10, 50],
            'tau_grid': None,
            'tau_points': DEFAULT_TAU_POINTS,
            'monte_carlo_slots': DEFAULT_MONTE_CARLO_SLOTS,
        },
        'orient': {
            'thresholds': asdict(OrientThresholds()),
        },
    }


# leaves whose default is None or a list still accept any JSON value
_FREE_LEAVES = {
    ('scenario', 'geometry', 'receiver_position'),
    ('dcf', 'tau_grid'),
}


def merge(base: Dict[str, Any], updates: Dict[str, Any], path: Sequence[str] = ()) -> Dict[str, Any]:
    """
    Recursively merge updates into a copy of base.

    Raises:
        ConfigError: On a key that base does not define, or a value where a section is expected
    """
    merged = copy.deepcopy(base)
    for key, value in updates.items():
        here = tuple(path) + (key,)
        dotted = '.'.join(here)
        if key not in merged:
            raise ConfigError(f"unknown config key '{dotted}'")
        if isinstance(merged[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{dotted}' is a section; expected an object")
            merged[key] = merge(merged[key], value, here)
        elif isinstance(value, dict) and here not in _FREE_LEAVES:
            raise ConfigError(f"'{dotted}' is a value, not a section")
        else:
            merged[key] = value
    return merged


def parse_override(text: str) -> Dict[str, Any]:
    """Turn 'a.b.c=value' into {'a': {'b': {'c': value}}}"""
    if '=' not in text:
        raise ConfigError(f"override '{text}' must look like section.key=value")
    key, raw = text.split('=', 1)
    parts = [p for p in key.strip().split('.') if p]
    if not parts:
        raise ConfigError(f"override '{text}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    nested: Dict[str, Any] = {parts[-1]: value}
    for part in reversed(parts[:-1]):
        nested = {part: nested}
    return nested


@dataclass
class ExperimentConfig:
    """Typed view of a config document"""
    scenario: Scenario
    grid: PlannerGrid
    packet_bits_list: List[float]
    workers: int
    dcf_params: DcfParams
    n_stations_list: List[int]
    tau_grid: np.ndarray
    monte_carlo_slots: int
    thresholds: OrientThresholds
    document: Dict[str, Any] = field(default_factory=dict)
    source: Optional[str] = None


def build(document: Dict[str, Any], source: Optional[str] = None) -> ExperimentConfig:
    """
    Construct the model objects described by a merged document.

    Raises:
        ConfigError: If a value is rejected by the model dataclasses
    """
    s = document['scenario']
    d = document['dcf']
    try:
        scenario = Scenario(
            geometry=Geometry(**s['geometry']),
            channel=ChannelParams(**s['channel']),
            radio=RadioParams(**s['radio']),
            compute=ComputeParams(**s['compute']),
            propulsion=PropulsionParams(**s['propulsion']),
            packet_bits=float(s['packet_bits']),
            delay_constraint_s=float(s['delay_constraint_s']),
        )
        grid = PlannerGrid(**document['planner'])
        dcf_params = DcfParams(**d['params'])
        thresholds = OrientThresholds(**document['orient']['thresholds'])

        packets = [float(b) for b in document['sweep']['packet_bits_list']]
        workers = int(document['sweep']['workers'])
        n_list = [int(n) for n in d['n_stations_list']]
        if d['tau_grid'] is not None:
            tau_grid = np.asarray(d['tau_grid'], dtype=float)
        else:
            tau_grid = np.linspace(0.0, 1.0, int(d['tau_points']))
        slots = int(d['monte_carlo_slots'])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid config{f' {source}' if source else ''}: {e}") from e

    if workers < 1:
        raise ConfigError("sweep.workers must be >= 1")
    if not n_list or any(n < 1 for n in n_list):
        raise ConfigError("dcf.n_stations_list must hold integers >= 1")
    if tau_grid.size == 0 or np.any((tau_grid < 0) | (tau_grid > 1)):
        raise ConfigError("dcf.tau_grid must be a nonempty subset of [0, 1]")
    if slots < 1:
        raise ConfigError("dcf.monte_carlo_slots must be >= 1")

    return ExperimentConfig(
        scenario=scenario,
        grid=grid,
        packet_bits_list=packets,
        workers=workers,
        dcf_params=dcf_params,
        n_stations_list=n_list,
        tau_grid=tau_grid,
        monte_carlo_slots=slots,
        thresholds=thresholds,
        document=document,
        source=source,
    )


def load_config(path: Optional[Union[str, Path]] = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """
    Load a config file (or the UAVCPS_CONFIG file, or pure defaults) and apply overrides.

    Raises:
        ConfigError: If the file cannot be read, is not JSON, or holds unknown keys or bad values
    """
    if path is None:
        path = os.getenv(ENV_CONFIG) or None

    document = default_document()
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        document = merge(document, raw)
        logger.info(f"Loaded config {path}")

    for text in overrides:
        document = merge(document, parse_override(text))
        logger.debug(f"Applied override {text}")

    return build(document, str(path) if path is not None else None)


def log_level() -> str:
    return os.getenv(ENV_LOG_LEVEL, 'INFO').upper()


def output_dir() -> Path:
    return Path(os.getenv(ENV_OUTPUT_DIR, 'results'))
