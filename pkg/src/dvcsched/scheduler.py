"""Greedy station assignment, objective, utilization/parallelization metrics
and the conservative single-bus baseline."""

from __future__ import annotations

import dataclasses
import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

from .constraints import (
    ScheduleState,
    TaskKey,
    check_constraints,
    master_prerequisite,
    rule_histogram,
)
from .errors import EmptySchedule, Infeasible, InvalidInstance
from .model import BusType, Instance, ProcessType, Task, validate_instance

DEFAULT_ALPHA = 1e6
DEFAULT_BETA = 1.0
DEFAULT_CT_S = 88


@dataclass(frozen=True)
class SchedulerParams:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    ct_override: Optional[int] = None

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise ValueError("weights must be nonnegative with alpha + beta > 0")


@dataclass
class Schedule:
    state: ScheduleState
    alpha: float
    beta: float
    ct_s: int
    buses: tuple
    station_indices: tuple
    f: float = 0.0

    @property
    def z(self) -> dict[int, int]:
        used = set(self.state.used_stations())
        return {s: int(s in used) for s in self.station_indices}

    @property
    def y(self) -> dict[tuple[BusType, int], int]:
        return {(b, s): int(bool(self.state.sequence(b, s))) for s in self.station_indices for b in self.buses}

    @property
    def station_count(self) -> int:
        return len(self.state.used_stations())

    @property
    def total_cd(self) -> int:
        return sum(self.state.cd.values())

    def assignments(self) -> list[dict]:
        """One row per task in replay order, with its offset inside the bus sequence."""
        rows = []
        for (bus, station), seq in sorted(self.state.sequences.items(), key=lambda kv: (kv[0][1], kv[0][0].rank)):
            offset = 0
            for key in seq:
                d = self.state.durations[key]
                rows.append(
                    {"ecu": key[0], "process": key[1], "bus": bus, "station": station,
                     "start_offset_s": offset, "duration_s": d}
                )
                offset += d
        return rows


def objective(schedule: Schedule, alpha: float, beta: float) -> float:
    return alpha * schedule.station_count + beta * schedule.total_cd


@dataclass(frozen=True)
class Metrics:
    U: float
    P: float


def compute_metrics(schedule: Schedule, instance: Instance) -> Metrics:
    """Mean per-station utilization and bus parallelization over used stations."""
    used = schedule.state.used_stations()
    if not used:
        raise EmptySchedule("no task scheduled")
    n_bus = len(instance.buses)
    ct = schedule.ct_s
    u_sum = 0.0
    p_sum = 0.0
    for s in used:
        active = [b for b in instance.buses if schedule.state.sequence(b, s)]
        u_sum += sum(schedule.state.cumulative(b, s) / ct for b in active)
        p_sum += len(active) / n_bus
    return Metrics(U=u_sum / len(used), P=p_sum / len(used))


def _sort_key(instance: Instance, task: Task) -> tuple:
    ecu = instance.ecus[task.ecu_id]
    asm = instance.assembly.get(ecu.id)
    return (
        int(task.process),
        ecu.bus.rank,
        asm if asm is not None else 1 << 30,
        ecu.diagnostic_address,
        ecu.id,
    )


def _prerequisites(instance: Instance, task: Task) -> list[TaskKey]:
    keys = []
    lower = [p for p in instance.processes_of.get(task.ecu_id, ()) if p < task.process]
    if lower:
        keys.append((task.ecu_id, max(lower)))
    prereq = master_prerequisite(instance, task)
    if prereq is not None and prereq[1] in instance.task_map:
        keys.append(prereq[1])
    return keys


def task_order(instance: Instance) -> list[Task]:
    """Placement order: the sort key (process, bus, assembly station, DA)
    restricted to tasks whose prerequisites are already placed.

    Tasks caught in a dependency cycle are appended last, so they fail
    placement instead of vanishing.
    """
    pending: dict[TaskKey, set] = {}
    dependents: dict[TaskKey, list] = {}
    for task in instance.tasks:
        pre = set(_prerequisites(instance, task))
        pending[task.key] = pre
        for key in pre:
            dependents.setdefault(key, []).append(task.key)
    heap = [(_sort_key(instance, t), t.key) for t in instance.tasks if not pending[t.key]]
    heapq.heapify(heap)
    order: list[Task] = []
    done: set = set()
    while heap:
        _, key = heapq.heappop(heap)
        order.append(instance.task_map[key])
        done.add(key)
        for dep in dependents.get(key, ()):
            pending[dep].discard(key)
            if not pending[dep] and dep not in done:
                heapq.heappush(heap, (_sort_key(instance, instance.task_map[dep]), dep))
    stuck = [t for t in instance.tasks if t.key not in done]
    order.extend(sorted(stuck, key=lambda t: _sort_key(instance, t)))
    return order


def earliest_station(instance: Instance, task: Task, state: ScheduleState) -> int:
    """Lowest station index that can pass the assembly, bus and ordering rules."""
    ecu = instance.ecus[task.ecu_id]
    bounds = [instance.station_indices[0]]
    asm = instance.assembly.get(ecu.id)
    if asm is not None:
        bounds.append(asm)
    ready = instance.ready_stations.get(ecu.bus)
    if ready is not None:
        bounds.append(ready)
    for key in _prerequisites(instance, task):
        st = state.assigned.get(key)
        if st is not None:
            bounds.append(st)
    return max(bounds)


def _prepare(instance: Instance, params: SchedulerParams) -> Instance:
    issues = validate_instance(instance)
    if issues:
        raise InvalidInstance("; ".join(f"{i.subject}:{i.rule}" for i in issues))
    if params.ct_override is not None and params.ct_override != instance.ct_s:
        instance = dataclasses.replace(instance, ct_s=params.ct_override)
    return instance


StationFilter = Callable[[ScheduleState, Task, BusType, int], bool]


def _greedy(instance: Instance, params: SchedulerParams, allow: Optional[StationFilter] = None) -> Schedule:
    instance = _prepare(instance, params)
    state = ScheduleState()
    for task in task_order(instance):
        bus = instance.ecus[task.ecu_id].bus
        start = earliest_station(instance, task, state)
        hist: Counter = Counter()
        for s in instance.station_indices:
            if s < start:
                continue
            if allow is not None and not allow(state, task, bus, s):
                hist["Baseline"] += 1
                continue
            violations = check_constraints(task, s, state, instance)
            if not violations:
                state.place(task, bus, s)
                break
            hist.update(rule_histogram(violations))
        else:
            raise Infeasible((task.ecu_id, task.process.slug), hist)
    return make_schedule(state, instance, params)


def make_schedule(state: ScheduleState, instance: Instance, params: SchedulerParams) -> Schedule:
    ct = params.ct_override if params.ct_override is not None else instance.ct_s
    sched = Schedule(
        state=state,
        alpha=params.alpha,
        beta=params.beta,
        ct_s=ct,
        buses=tuple(instance.buses),
        station_indices=tuple(instance.station_indices),
    )
    sched.f = objective(sched, params.alpha, params.beta)
    return sched


def schedule(instance: Instance, params: SchedulerParams = SchedulerParams()) -> Schedule:
    """First-fit placement of every task in :func:`task_order`.

    Each task scans the line downstream from its earliest legal station and
    takes the first station where ``check_constraints`` finds nothing.
    Raises :class:`Infeasible` with a per-rule rejection histogram when the
    line runs out.
    """
    return _greedy(instance, params)


def _single_bus(state: ScheduleState, task: Task, bus: BusType, station: int) -> bool:
    return all(b is bus for b in state.buses_at(station))


def baseline_sequential(instance: Instance, params: SchedulerParams = SchedulerParams()) -> Schedule:
    """Conservative manual-style plan: same placement order as :func:`schedule`,
    but a station serves the tasks of one bus only, so buses never run in
    parallel."""
    return _greedy(instance, params, allow=_single_bus)


def process_breakdown(schedule: Schedule, instance: Instance) -> dict[str, dict]:
    """Per process type: stations hosting it, and U/P restricted to its tasks."""
    out = {}
    tasks = instance.task_map
    for proc in ProcessType:
        per_station: dict[int, Counter] = {}
        for (bus, s), seq in schedule.state.sequences.items():
            for key in seq:
                if key[1] is proc:
                    per_station.setdefault(s, Counter())[bus] += tasks[key].duration_s
        n = len(per_station)
        if n == 0:
            out[proc.slug] = {"stations": 0, "U": 0.0, "P": 0.0}
            continue
        u = sum(d / schedule.ct_s for c in per_station.values() for d in c.values()) / n
        p = sum(len(c) / len(instance.buses) for c in per_station.values()) / n
        out[proc.slug] = {"stations": n, "U": u, "P": p}
    return out
