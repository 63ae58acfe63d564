"""
Synthetic observation traces for the orient module

Three scripted environment profiles (collision-heavy, interference-heavy,
shadowed) draw labelled LinkObservation records from fixed ranges. Traces
are stored as JSON: a list of flat records with the LinkObservation fields
and an optional "label" naming the true cause.
"""
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from errors import TraceParseError
from orient import Cause, LinkObservation

logger = logging.getLogger(__name__)

MAX_RETRANSMISSIONS = 7
NOMINAL_SHARE = 0.2

# (low, high) per field; avg_retransmissions ranges are fractions of the limit
_RANGES: Dict[Cause, Dict[str, Tuple[float, float]]] = {
    Cause.COLLISION: {
        'avg_retransmissions': (0.1, 0.75),
        'packet_loss_rate': (0.15, 0.6),
        'rssi_dBm': (-80.0, -60.0),
        'idle_channel_energy_dBm': (-105.0, -95.0),
        'sinr_dB': (2.0, 12.0),
    },
    Cause.INTERFERENCE: {
        'avg_retransmissions': (0.93, 1.0),
        'packet_loss_rate': (0.3, 0.9),
        'rssi_dBm': (-80.0, -60.0),
        'idle_channel_energy_dBm': (-85.0, -60.0),
        'sinr_dB': (-5.0, 3.0),
    },
    Cause.SHADOWING: {
        'avg_retransmissions': (0.93, 1.0),
        'packet_loss_rate': (0.3, 0.9),
        'rssi_dBm': (-115.0, -98.0),
        'idle_channel_energy_dBm': (-105.0, -95.0),
        'sinr_dB': (-8.0, 2.0),
    },
    Cause.NOMINAL: {
        'avg_retransmissions': (0.0, 0.25),
        'packet_loss_rate': (0.0, 0.05),
        'rssi_dBm': (-75.0, -55.0),
        'idle_channel_energy_dBm': (-105.0, -95.0),
        'sinr_dB': (15.0, 30.0),
    },
}

PROFILES: Dict[str, Cause] = {
    'collision-heavy': Cause.COLLISION,
    'interference-heavy': Cause.INTERFERENCE,
    'shadowed': Cause.SHADOWING,
}


@dataclass(frozen=True)
class TraceRecord:
    observation: LinkObservation
    label: Optional[Cause] = None

    def to_dict(self) -> Dict:
        record = asdict(self.observation)
        if self.label is not None:
            record['label'] = self.label.value
        return record


def _draw(rng: np.random.Generator, cause: Cause) -> LinkObservation:
    ranges = _RANGES[cause]
    values = {name: float(rng.uniform(lo, hi)) for name, (lo, hi) in ranges.items()}
    values['avg_retransmissions'] = round(values['avg_retransmissions'] * MAX_RETRANSMISSIONS, 3)
    return LinkObservation(max_retransmissions=MAX_RETRANSMISSIONS, **values)


def generate_trace(profile: str, n_records: int, seed: int = 0) -> List[TraceRecord]:
    """
    Labelled observations for one scripted environment.

    Roughly NOMINAL_SHARE of the records are healthy-link observations; the
    rest carry the profile's cause.

    Raises:
        ValueError: If the profile is unknown or n_records < 1
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    if n_records < 1:
        raise ValueError("n_records must be >= 1")

    rng = np.random.default_rng(seed)
    cause = PROFILES[profile]
    records = []
    for _ in range(n_records):
        label = Cause.NOMINAL if rng.random() < NOMINAL_SHARE else cause
        records.append(TraceRecord(_draw(rng, label), label))
    logger.info(f"Generated {n_records} records for profile {profile} (seed {seed})")
    return records


def parse_records(raw: Union[List, Dict]) -> List[TraceRecord]:
    """
    Parse decoded JSON into trace records.

    Accepts a bare list of records or an object with a "records" list.

    Raises:
        TraceParseError: On the first malformed record, naming its index
    """
    if isinstance(raw, dict):
        raw = raw.get('records')
    if not isinstance(raw, list):
        raise TraceParseError("trace must be a list of observation records")

    names = {f.name for f in fields(LinkObservation)}
    records = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise TraceParseError(f"expected an object, got {type(item).__name__}", record_index=i)
        missing = names - item.keys()
        if missing:
            raise TraceParseError(f"missing fields {sorted(missing)}", record_index=i)
        unknown = item.keys() - names - {'label'}
        if unknown:
            raise TraceParseError(f"unknown fields {sorted(unknown)}", record_index=i)
        try:
            observation = LinkObservation(**{name: item[name] for name in names})
            label = Cause(item['label']) if item.get('label') is not None else None
        except (TypeError, ValueError) as e:
            raise TraceParseError(str(e), record_index=i) from e
        records.append(TraceRecord(observation, label))
    return records


def load_trace(path: Union[str, Path]) -> List[TraceRecord]:
    """
    Read a JSON trace file.

    Raises:
        TraceParseError: If the file cannot be read, is not valid JSON or holds a malformed record
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise TraceParseError(f"cannot read trace {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise TraceParseError(f"{path}: invalid JSON ({e})") from e
    records = parse_records(raw)
    logger.info(f"Loaded {len(records)} records from {path}")
    return records


def save_trace(path: Union[str, Path], records: List[TraceRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps([r.to_dict() for r in records], indent=2) + '\n')
    logger.info(f"Saved {len(records)} records to {path}")
