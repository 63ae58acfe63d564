"""
Rule-based orientation of communication problems

Maps cross-layer link observations to a likely cause and to the dimension
(communication, computation or control) in which the problem should be
handled. The discriminating attribute is the average retransmission count:
internal collisions leave it below the protocol limit, while external
interference and shadow fading drive it to saturation. Idle-channel energy
then separates interference from shadowing.

orient_task orients a whole delivery task instead, from the planner's
verdicts: if hovering in place misses the deadline the task is not a pure
communication issue.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from errors import InfeasibleScenarioError
from planner import DEFAULT_GRID, PlanEvaluation, PlannerGrid, Scenario, optimize_cps, optimize_hover_only, optimize_jpcc

logger = logging.getLogger(__name__)


class Cause(str, Enum):
    COLLISION = 'collision'
    INTERFERENCE = 'interference'
    SHADOWING = 'shadowing'
    NOMINAL = 'nominal'


class IssueDimension(str, Enum):
    COMMUNICATION = 'communication'
    COMPUTATION = 'computation'
    CONTROL = 'control'


@dataclass(frozen=True)
class LinkObservation:
    """Cross-layer measurements of one link over an observation window"""
    avg_retransmissions: float
    max_retransmissions: int
    packet_loss_rate: float
    rssi_dBm: float
    idle_channel_energy_dBm: float
    sinr_dB: float

    def __post_init__(self):
        if not 0 <= self.avg_retransmissions <= self.max_retransmissions:
            raise ValueError(
                f"avg_retransmissions {self.avg_retransmissions} outside [0, {self.max_retransmissions}]"
            )
        if not 0 <= self.packet_loss_rate <= 1:
            raise ValueError(f"packet_loss_rate {self.packet_loss_rate} outside [0, 1]")


@dataclass(frozen=True)
class OrientThresholds:
    """Decision-table thresholds"""
    retx_saturation_fraction: float = 0.9
    loss_threshold: float = 0.1
    interference_threshold_dBm: float = -90.0
    rssi_floor_dBm: float = -95.0

    def __post_init__(self):
        if not 0 < self.retx_saturation_fraction <= 1:
            raise ValueError("retx_saturation_fraction must lie in (0, 1]")
        if not 0 <= self.loss_threshold <= 1:
            raise ValueError("loss_threshold must lie in [0, 1]")


ISSUE_FOR_CAUSE = {
    Cause.COLLISION: IssueDimension.COMMUNICATION,
    Cause.INTERFERENCE: IssueDimension.COMMUNICATION,
    Cause.SHADOWING: IssueDimension.CONTROL,
    Cause.NOMINAL: IssueDimension.COMMUNICATION,
}


@dataclass(frozen=True)
class Orientation:
    """Cause class, issue dimension and a short human-readable rationale"""
    cause: Cause
    issue_dimension: IssueDimension
    rationale: str = ''

    def __post_init__(self):
        if self.issue_dimension is not ISSUE_FOR_CAUSE[self.cause]:
            raise ValueError(f"cause {self.cause.value} must map to {ISSUE_FOR_CAUSE[self.cause].value}")


def _orientation(cause: Cause, rationale: str) -> Orientation:
    return Orientation(cause=cause, issue_dimension=ISSUE_FOR_CAUSE[cause], rationale=rationale)


def orient(obs: LinkObservation, thresholds: OrientThresholds = OrientThresholds()) -> Orientation:
    """
    Classify one observation.

    Rules are checked in order: interference, shadowing, collision, nominal.
    """
    limit = thresholds.retx_saturation_fraction * obs.max_retransmissions
    saturated = obs.avg_retransmissions >= limit

    if saturated and obs.idle_channel_energy_dBm > thresholds.interference_threshold_dBm:
        return _orientation(
            Cause.INTERFERENCE,
            f"retransmissions saturated ({obs.avg_retransmissions:g}/{obs.max_retransmissions}) "
            f"with idle-channel energy {obs.idle_channel_energy_dBm:g} dBm above "
            f"{thresholds.interference_threshold_dBm:g} dBm",
        )
    if saturated and obs.rssi_dBm < thresholds.rssi_floor_dBm:
        return _orientation(
            Cause.SHADOWING,
            f"retransmissions saturated ({obs.avg_retransmissions:g}/{obs.max_retransmissions}) "
            f"on a quiet channel with RSSI {obs.rssi_dBm:g} dBm below {thresholds.rssi_floor_dBm:g} dBm",
        )
    if not saturated and obs.packet_loss_rate > thresholds.loss_threshold:
        return _orientation(
            Cause.COLLISION,
            f"loss {obs.packet_loss_rate:.0%} with retransmissions below saturation "
            f"({obs.avg_retransmissions:g} < {limit:g})",
        )
    return _orientation(Cause.NOMINAL, "no rule matched")


@dataclass
class TaskOrientation:
    """Which decision dimension a delivery task needs, from the planners' verdicts"""
    issue_dimension: Optional[IssueDimension]
    rationale: str
    evaluations: Dict[str, Optional[PlanEvaluation]] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.issue_dimension is not None


def _try(optimizer, scenario: Scenario, grid: PlannerGrid) -> Optional[PlanEvaluation]:
    try:
        return optimizer(scenario, grid)[1]
    except InfeasibleScenarioError:
        return None


def orient_task(scenario: Scenario, grid: PlannerGrid = DEFAULT_GRID) -> TaskOrientation:
    """
    Orient a delivery task.

    communication: hovering in place and tuning the radio meets the deadline
    control: the sender has to fly (JP-CC feasible, hover-only not)
    computation: only a plan with a computation phase meets the deadline
    None: nothing on the grid meets the deadline
    """
    evaluations = {
        'hover-only': _try(optimize_hover_only, scenario, grid),
        'JP-CC': _try(optimize_jpcc, scenario, grid),
        'CPS': _try(optimize_cps, scenario, grid),
    }
    T = scenario.delay_constraint_s
    if evaluations['hover-only'] is not None:
        result = TaskOrientation(IssueDimension.COMMUNICATION,
                                 f"hover-only transmission meets the {T:g} s deadline", evaluations)
    elif evaluations['JP-CC'] is not None:
        result = TaskOrientation(IssueDimension.CONTROL,
                                 f"initial link misses the {T:g} s deadline; flying recovers it", evaluations)
    elif evaluations['CPS'] is not None:
        result = TaskOrientation(IssueDimension.COMPUTATION,
                                 f"only a computation phase brings the task under {T:g} s", evaluations)
    else:
        result = TaskOrientation(None, f"no plan meets the {T:g} s deadline", evaluations)
    logger.info(f"Task orientation: {result.issue_dimension.value if result.feasible else 'infeasible'} "
                f"({result.rationale})")
    return result
