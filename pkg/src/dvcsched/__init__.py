"""Station planning for ECU commissioning (ID check, flash, configuration,
calibration) on a vehicle assembly line."""

from .constraints import Rule, ScheduleState, Violation, check_constraints, replay
from .graph import PrecedenceGraph, build_precedence_graph, check_dag, export
from .instance_io import load_instance, write_instance_dir
from .model import (
    BusType,
    DiagnosticClass,
    Ecu,
    Instance,
    PowerLevel,
    ProcessType,
    Signal,
    Station,
    Task,
    Terminal,
    validate_instance,
    validate_topology,
)
from .oracle import oracle_optimal
from .scheduler import (
    Metrics,
    Schedule,
    SchedulerParams,
    baseline_sequential,
    compute_metrics,
    objective,
    schedule,
)
from .synth import Profile, gen_corpus, gen_instance

__version__ = "0.1.0"

__all__ = [
    "BusType",
    "DiagnosticClass",
    "Ecu",
    "Instance",
    "Metrics",
    "PowerLevel",
    "PrecedenceGraph",
    "ProcessType",
    "Profile",
    "Rule",
    "Schedule",
    "ScheduleState",
    "SchedulerParams",
    "Signal",
    "Station",
    "Task",
    "Terminal",
    "Violation",
    "baseline_sequential",
    "build_precedence_graph",
    "check_constraints",
    "check_dag",
    "compute_metrics",
    "export",
    "gen_corpus",
    "gen_instance",
    "load_instance",
    "objective",
    "oracle_optimal",
    "replay",
    "schedule",
    "validate_instance",
    "validate_topology",
    "write_instance_dir",
]
