"""
Exception hierarchy for the UAV compute-fly-transmit planner
"""
from typing import Optional, Tuple


class UavCpsError(Exception):
    """Base class for every error raised by the planner and harness"""


class DomainError(UavCpsError, ValueError):
    """Input outside the domain of a model function (negative speed, distance <= 0, ...)"""


class SearchBracketError(UavCpsError, RuntimeError):
    """A 1-D search could not bracket an interior optimum"""

    def __init__(self, message: str, bracket: Tuple[float, float]):
        super().__init__(f"{message} (bracket [{bracket[0]:g}, {bracket[1]:g}])")
        self.bracket = bracket


class GeometryDegeneracyError(UavCpsError, ValueError):
    """Sender and receiver occupy the same point"""


class ConstraintViolationError(UavCpsError, ValueError):
    """A decision variable lies outside its admissible range"""


class InfeasibleLinkError(UavCpsError, ValueError):
    """The link cannot carry any data (rate <= 0)"""


class InfeasibleScenarioError(UavCpsError, RuntimeError):
    """
    No candidate plan meets the delay constraint.

    The least-violating plan and its evaluation are attached so callers can
    report how far the scenario is from feasible.
    """

    def __init__(self, message: str, plan=None, evaluation=None):
        super().__init__(message)
        self.plan = plan
        self.evaluation = evaluation


class ConfigError(UavCpsError, ValueError):
    """Config document could not be read or contains an invalid entry"""


class TraceParseError(UavCpsError, ValueError):
    """An observation trace record is malformed"""

    def __init__(self, message: str, record_index: Optional[int] = None):
        prefix = f"record {record_index}: " if record_index is not None else ""
        super().__init__(prefix + message)
        self.record_index = record_index
