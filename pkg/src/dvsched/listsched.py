"""Greedy extended list scheduling with duration selection under a budget.

The scheduler is deliberately incomplete: every node is placed at its
earliest precedence-feasible step, durations are chosen greedily by the
given priority, and there is no deferral or backtracking.  Infeasibility is
therefore a value (None), not a fault; the exhaustive search in
:mod:`dvsched.bb` may still find a schedule where this one gives up.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .dfg import Dfg, Schedule, TimingInfo, topological_order
from .power import POWER_EPS, ArchMode, ResourceLibrary, schedule_cost


@dataclass(frozen=True)
class Budget:
    """Per-type area caps, or a total power cap, or no constraint.

    At most one of the two constraint kinds may be set.
    """

    area_caps: Mapping[str, int] | None = None
    power_cap: float | None = None

    def __post_init__(self) -> None:
        if self.area_caps is not None and self.power_cap is not None:
            raise ValueError("a budget constrains area or power, not both")
        if self.area_caps is not None and any(c < 0 for c in self.area_caps.values()):
            raise ValueError("area caps must be >= 0")
        if self.power_cap is not None and self.power_cap < 0:
            raise ValueError("power cap must be >= 0")

    @property
    def unconstrained(self) -> bool:
        return self.area_caps is None and self.power_cap is None

    def allows(self, area_by_type: Mapping[str, int], power: float) -> bool:
        if self.area_caps is not None:
            for op, cap in self.area_caps.items():
                if area_by_type.get(op, 0) > cap:
                    return False
        if self.power_cap is not None and power > self.power_cap + POWER_EPS:
            return False
        return True


class Priority(Enum):
    MAX_DURATION = "max-duration"
    MIN_DURATION = "min-duration"


def list_schedule(
    g: Dfg,
    timing: TimingInfo,
    lib: ResourceLibrary,
    mode: ArchMode,
    budget: Budget = Budget(),
    priority: Priority = Priority.MIN_DURATION,
) -> Schedule | None:
    """One greedy pass in topological order; None when it gets stuck.

    Each node starts as early as precedence allows and takes the largest
    (MAX_DURATION) or smallest (MIN_DURATION) library cycle count that both
    meets its deadline window and keeps the running prefix cost within the
    budget.  With no budget and MIN_DURATION this degenerates to the
    unit-duration ASAP schedule.
    """
    schedule: Schedule = {}
    for v in topological_order(g):
        op = g.nodes[v]
        earliest = timing.asap[v]
        for u in g.preds[v]:
            su, du = schedule[u]
            earliest = max(earliest, su + du)
        if mode is ArchMode.SINGLE_VDD:
            candidates = [lib.fastest(op).cycles]
        else:
            candidates = list(lib.cycle_counts(op))
        if priority is Priority.MAX_DURATION:
            candidates.sort(reverse=True)
        else:
            candidates.sort()
        placed = False
        for dur in candidates:
            if earliest + dur - 1 > timing.alap[v]:
                continue
            schedule[v] = (earliest, dur)
            if budget.unconstrained:
                placed = True
                break
            cost = schedule_cost(g, schedule, lib, mode, timing.latency_bound)
            if budget.allows(cost.area_by_type, cost.power):
                placed = True
                break
            del schedule[v]
        if not placed:
            return None
    return schedule
