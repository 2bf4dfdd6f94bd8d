"""Dock scheduling and truck sequencing toolkit."""

from .core import (DockRun, FormatError, InfeasibleScheduleError, Instance,
                   Schedule, Trailer, Violation, check_schedule, completion,
                   earliest_start, evaluate, format_schedule, make_schedule,
                   parse_schedule, try_insert, waiting)
from .construct import ARRIVAL_HORIZONTAL, ARRIVAL_VERTICAL, MIN_ARRIVAL_VERTICAL, METHODS, construct
from .exact import ExactLimits, ExactSearchTimeout, brute_force_optimum
from .instgen import GenConfig, generate, instance_name, read_instance, write_instance
from .vns import OperatorId, TransitionMatrix, VnsConfig, VnsStats, matrix_distance, update_transition, vns_solve

__all__ = [
    "DockRun", "FormatError", "InfeasibleScheduleError", "Instance", "Schedule",
    "Trailer", "Violation", "check_schedule", "completion", "earliest_start",
    "evaluate", "format_schedule", "make_schedule", "parse_schedule", "try_insert",
    "waiting", "ARRIVAL_HORIZONTAL", "ARRIVAL_VERTICAL", "MIN_ARRIVAL_VERTICAL",
    "METHODS", "construct", "ExactLimits", "ExactSearchTimeout", "brute_force_optimum",
    "GenConfig", "generate", "instance_name", "read_instance", "write_instance",
    "OperatorId", "TransitionMatrix", "VnsConfig", "VnsStats", "matrix_distance",
    "update_transition", "vns_solve",
]
