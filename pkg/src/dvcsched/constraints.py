"""Predicate engine for station admissibility of DVC tasks.

``check_constraints`` is shared by the greedy scheduler, the baseline, the
exhaustive oracle and the post-hoc replay in :func:`replay`, so a schedule
is only ever accepted by the same rules that produced it.
"""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import UnknownEcu, UnknownStation
from .model import (
    BusType,
    DiagnosticClass,
    Ecu,
    Instance,
    PowerLevel,
    ProcessType,
    Station,
    Task,
    Terminal,
)

TaskKey = tuple  # (ecu_id, ProcessType)


class Rule(enum.Enum):
    ASSEMBLED = "Assembled"
    POWER_HV = "PowerHV"
    BUS_READY = "BusReady"
    SIGNALS = "Signals"
    ID_CHECK_DEPENDENCY = "IdCheckDependency"
    FLASH_DEPENDENCY = "FlashDependency"
    FLASH_EXCLUSIVE = "FlashExclusive"
    CONFIG_DEPENDENCY = "ConfigDependency"
    NO_ASSEMBLY_DURING_CONFIG = "NoAssemblyDuringConfig"
    MASTER_GROUP_EXCLUSION = "MasterGroupExclusion"
    PROCESS_ORDER = "ProcessOrder"
    CYCLE_TIME = "CycleTime"
    # replay only: a task of the instance never got a station
    UNSCHEDULED = "Unscheduled"

    @property
    def code(self) -> str:
        return f"R{_RULE_ORDER[self] + 1}"

    @property
    def order(self) -> int:
        return _RULE_ORDER[self]


_RULE_ORDER = {rule: i for i, rule in enumerate(Rule)}


@dataclass(frozen=True)
class Violation:
    rule: Rule
    ecu_id: str
    station: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"rule": self.rule.value, "ecu": self.ecu_id, "station": self.station, "detail": self.detail}


class ScheduleState:
    """Mutable assignment state: task stations, per-(bus, station) sequences, CD."""

    def __init__(self) -> None:
        self.assigned: dict[TaskKey, int] = {}
        self.durations: dict[TaskKey, int] = {}
        self.sequences: dict[tuple[BusType, int], list[TaskKey]] = defaultdict(list)
        self.cd: dict[tuple[BusType, int], int] = defaultdict(int)
        self._per_station: Counter = Counter()  # (station, ecu_id) -> task count
        self._flash_at: set = set()  # (bus, station) holding a Flash
        self._procs_at: Counter = Counter()  # (station, process) -> task count
        self._buses_at: Counter = Counter()  # (station, bus) -> task count

    def place(self, task: Task, bus: BusType, station: int) -> None:
        if task.key in self.assigned:
            raise ValueError(f"{task.key} already assigned")
        self.assigned[task.key] = station
        self.durations[task.key] = task.duration_s
        self.sequences[(bus, station)].append(task.key)
        self.cd[(bus, station)] += task.duration_s
        self._per_station[(station, task.ecu_id)] += 1
        self._procs_at[(station, task.process)] += 1
        self._buses_at[(station, bus)] += 1
        if task.process is ProcessType.FLASH:
            self._flash_at.add((bus, station))

    def unplace(self, task: Task, bus: BusType) -> None:
        """Undo the most recent placement of ``task`` (LIFO only)."""
        station = self.assigned.pop(task.key)
        del self.durations[task.key]
        seq = self.sequences[(bus, station)]
        if not seq or seq[-1] != task.key:
            raise ValueError("unplace must undo the last placement on its sequence")
        seq.pop()
        self.cd[(bus, station)] -= task.duration_s
        if not seq:
            del self.sequences[(bus, station)]
            del self.cd[(bus, station)]
        self._per_station[(station, task.ecu_id)] -= 1
        self._procs_at[(station, task.process)] -= 1
        self._buses_at[(station, bus)] -= 1
        if task.process is ProcessType.FLASH:
            self._flash_at.discard((bus, station))

    def sequence(self, bus: BusType, station: int) -> list[TaskKey]:
        return self.sequences.get((bus, station), [])

    def cumulative(self, bus: BusType, station: int) -> int:
        return self.cd.get((bus, station), 0)

    def has_tasks(self, station: int, ecu_id: str) -> bool:
        return self._per_station.get((station, ecu_id), 0) > 0

    def has_flash(self, bus: BusType, station: int) -> bool:
        return (bus, station) in self._flash_at

    def buses_at(self, station: int) -> list[BusType]:
        return sorted(b for b in BusType if self._buses_at.get((station, b), 0) > 0)

    def processes_at(self, station: int) -> set:
        return {p for p in ProcessType if self._procs_at.get((station, p), 0) > 0}

    def used_stations(self) -> list[int]:
        return sorted({s for (_, s), seq in self.sequences.items() if seq})

    def copy(self) -> "ScheduleState":
        other = ScheduleState()
        other.assigned = dict(self.assigned)
        other.durations = dict(self.durations)
        other.sequences = defaultdict(list, {k: list(v) for k, v in self.sequences.items()})
        other.cd = defaultdict(int, self.cd)
        other._per_station = Counter(self._per_station)
        other._flash_at = set(self._flash_at)
        other._procs_at = Counter(self._procs_at)
        other._buses_at = Counter(self._buses_at)
        return other


def bus_ready(bus: BusType, station: int, instance: Instance) -> bool:
    """True once the bus infrastructure is assembled at or before ``station``."""
    if station not in instance.station_map:
        raise UnknownStation(station)
    ready = instance.ready_stations[bus]
    return ready is not None and station >= ready


def power_ok(ecu: Ecu, task: Task, station: Station) -> bool:
    if station.power is PowerLevel.NONE:
        return False
    if ecu.terminal is Terminal.T30 and station.power is not PowerLevel.EXTERNAL:
        return False
    if task.needs_hv and not station.hv_capable:
        return False
    return True


def signals_ok(task: Task, station: Station) -> bool:
    return task.required_signals <= station.signal_caps


def master_prerequisite(instance: Instance, task: Task) -> Optional[tuple[Rule, TaskKey]]:
    """Which task of the ECU's master has to be finished before ``task``.

    Returns ``(rule, master_task_key)`` or ``None`` when the ECU has no
    master or the master has no task that could serve as prerequisite.
    A master lacking the wanted process falls back to its last process
    preceding it.
    """
    ecu = instance.ecus[task.ecu_id]
    if ecu.master_id is None or ecu.master_id not in instance.ecus:
        return None
    low = ecu.dc <= DiagnosticClass.DC2
    master_procs = instance.processes_of.get(ecu.master_id, [])
    proc = task.process
    if proc is ProcessType.ID_CHECK:
        rule = Rule.ID_CHECK_DEPENDENCY
        wanted = ProcessType.CONFIGURATION if low else ProcessType.ID_CHECK
    elif proc is ProcessType.FLASH:
        rule = Rule.FLASH_DEPENDENCY
        wanted = ProcessType.CALCOM if low else ProcessType.ID_CHECK
    else:
        rule = Rule.CONFIG_DEPENDENCY
        if low and ProcessType.FLASH in master_procs:
            wanted = ProcessType.FLASH
        else:
            wanted = ProcessType.ID_CHECK
    candidates = [p for p in master_procs if p <= wanted]
    if not candidates:
        return None
    return rule, (ecu.master_id, max(candidates))


def _completed_before(state: ScheduleState, key: TaskKey, bus: BusType, station: int) -> bool:
    st = state.assigned.get(key)
    if st is None:
        return False
    if st < station:
        return True
    return st == station and key in state.sequence(bus, station)


def check_constraints(task: Task, station: int, state: ScheduleState, instance: Instance) -> list[Violation]:
    """Every rule ``task`` would break if appended to its bus sequence at ``station``."""
    ecu = instance.ecus.get(task.ecu_id)
    if ecu is None:
        raise UnknownEcu(task.ecu_id)
    st = instance.station_map.get(station)
    if st is None:
        raise UnknownStation(station)
    bus = ecu.bus
    out: list[Violation] = []

    def fail(rule: Rule, detail: str = "") -> None:
        out.append(Violation(rule, ecu.id, station, detail))

    asm = instance.assembly.get(ecu.id)
    if asm is None:
        fail(Rule.ASSEMBLED, "ECU is never assembled")
    elif station < asm:
        fail(Rule.ASSEMBLED, f"assembled at {asm}")

    if not power_ok(ecu, task, st):
        fail(Rule.POWER_HV, f"power={st.power.value} hv={st.hv_capable}")

    if not bus_ready(bus, station, instance):
        fail(Rule.BUS_READY, f"{bus.value} ready at {instance.ready_stations[bus]}")

    if not signals_ok(task, st):
        missing = sorted(s.value for s in task.required_signals - st.signal_caps)
        fail(Rule.SIGNALS, "missing " + ";".join(missing))

    prereq = master_prerequisite(instance, task)
    if prereq is not None:
        rule, key = prereq
        if not _completed_before(state, key, bus, station):
            fail(rule, f"needs {key[0]}/{key[1].slug}")

    assembled_here = instance.assembled_on_bus.get((bus, station), ())
    if task.process is ProcessType.FLASH:
        if state.sequence(bus, station):
            fail(Rule.FLASH_EXCLUSIVE, "bus sequence already occupied")
        if assembled_here:
            fail(Rule.FLASH_EXCLUSIVE, "assembly on bus: " + ",".join(sorted(assembled_here)))
    elif state.has_flash(bus, station):
        fail(Rule.FLASH_EXCLUSIVE, "bus sequence holds a flash")

    if task.process in (ProcessType.CONFIGURATION, ProcessType.CALCOM) and assembled_here:
        fail(Rule.NO_ASSEMBLY_DURING_CONFIG, "assembly on bus: " + ",".join(sorted(assembled_here)))

    partners = instance.exclusion_partners.get(ecu.id, ())
    clash = sorted(p for p in partners if state.has_tasks(station, p))
    if clash:
        fail(Rule.MASTER_GROUP_EXCLUSION, "concurrent with " + ",".join(clash))

    if _process_order_broken(task, bus, station, state, instance):
        fail(Rule.PROCESS_ORDER)

    if state.cumulative(bus, station) + task.duration_s > instance.ct_s:
        fail(Rule.CYCLE_TIME, f"{state.cumulative(bus, station)}+{task.duration_s}>{instance.ct_s}")

    out.sort(key=lambda v: v.rule.order)
    return out


def _process_order_broken(task: Task, bus: BusType, station: int, state: ScheduleState, instance: Instance) -> bool:
    for proc in instance.processes_of.get(task.ecu_id, ()):
        if proc == task.process:
            continue
        key = (task.ecu_id, proc)
        if proc < task.process:
            if not _completed_before(state, key, bus, station):
                return True
        else:
            other = state.assigned.get(key)
            if other is not None and other <= station:
                return True
    return False


def replay_order(state: ScheduleState) -> list[tuple[BusType, int, TaskKey]]:
    """Stations ascending, buses in enum order, then sequence order."""
    out = []
    for (bus, station), seq in sorted(state.sequences.items(), key=lambda kv: (kv[0][1], kv[0][0].rank)):
        out.extend((bus, station, key) for key in seq)
    return out


def replay(instance: Instance, state: ScheduleState) -> list[Violation]:
    """Independently re-check a finished assignment task by task.

    Also reports tasks of the instance that were never assigned.
    """
    fresh = ScheduleState()
    violations: list[Violation] = []
    for bus, station, key in replay_order(state):
        task = instance.task_map.get(key)
        if task is None:
            raise UnknownEcu(f"{key[0]}/{key[1].slug}")
        violations.extend(check_constraints(task, station, fresh, instance))
        fresh.place(task, bus, station)
    for task in instance.tasks:
        if task.key not in state.assigned:
            violations.append(Violation(Rule.UNSCHEDULED, task.ecu_id, 0, task.process.slug))
    return violations


def rule_histogram(violations: Iterable[Violation]) -> Counter:
    return Counter(v.rule.value for v in violations)
