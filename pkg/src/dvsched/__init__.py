"""Voltage-aware operator scheduling on data-flow graphs.

Schedules each operation at a control step and a voltage level (encoded as
a cycle count) and explores the area/power trade-off under three
architecture cost models: a single supply rail, one rail per voltage
level, and per-unit dynamic voltage scaling with power gating.
"""

from .bb import (
    SearchConfig,
    SearchReport,
    bb_first,
    bb_pareto,
    bound_exceeded,
)
from .dfg import (
    CycleError,
    Dfg,
    DfgError,
    DfgParseError,
    Schedule,
    TimingInfo,
    Violation,
    compute_timing,
    parse_dfg,
    topological_order,
    validate_schedule,
)
from .listsched import Budget, Priority, list_schedule
from .oracle import (
    EnumerationBound,
    StateSpaceTooLarge,
    enumerate_schedules,
    oracle_front,
    state_space_estimate,
)
from .power import (
    POWER_EPS,
    ArchMode,
    CostTuple,
    LibraryError,
    ParetoEntry,
    ParetoSet,
    PowerBreakdown,
    ResourceLibrary,
    VoltageLevel,
    area_of,
    cost_equal,
    dominates,
    dominates3,
    load_resource_library,
    power_of,
    schedule_cost,
)

__version__ = "0.1.0"

__all__ = [
    "ArchMode",
    "Budget",
    "CostTuple",
    "CycleError",
    "Dfg",
    "DfgError",
    "DfgParseError",
    "EnumerationBound",
    "LibraryError",
    "POWER_EPS",
    "ParetoEntry",
    "ParetoSet",
    "PowerBreakdown",
    "Priority",
    "ResourceLibrary",
    "Schedule",
    "SearchConfig",
    "SearchReport",
    "StateSpaceTooLarge",
    "TimingInfo",
    "VoltageLevel",
    "Violation",
    "area_of",
    "bb_first",
    "bb_pareto",
    "bound_exceeded",
    "compute_timing",
    "cost_equal",
    "dominates",
    "dominates3",
    "enumerate_schedules",
    "list_schedule",
    "load_resource_library",
    "oracle_front",
    "parse_dfg",
    "power_of",
    "schedule_cost",
    "state_space_estimate",
    "topological_order",
    "validate_schedule",
]
