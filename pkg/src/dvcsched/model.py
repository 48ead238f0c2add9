"""Domain types for ECUs, stations, DVC tasks and schedulable instances."""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional


class BusType(enum.Enum):
    CAN = "CAN"
    FLEXRAY = "FlexRay"
    LIN = "LIN"
    MOST = "MOST"
    LVDS = "LVDS"

    @property
    def rank(self) -> int:
        return _BUS_RANK[self]

    @classmethod
    def parse(cls, text: str) -> "BusType":
        key = text.strip().lower()
        for bus in cls:
            if bus.value.lower() == key:
                return bus
        raise ValueError(f"unknown bus type {text!r}")

    def __lt__(self, other: "BusType") -> bool:
        return self.rank < other.rank


_BUS_RANK = {bus: i for i, bus in enumerate(BusType)}


class DiagnosticClass(enum.IntEnum):
    DC0 = 0
    DC1 = 1
    DC2 = 2
    DC3 = 3
    DC4 = 4


class Terminal(enum.Enum):
    T15 = "15"  # ignition-switched
    T30 = "30"  # permanent battery


class PowerLevel(enum.Enum):
    NONE = "none"
    IGNITION = "ignition"
    EXTERNAL = "external"


class Signal(enum.Enum):
    V = "v"
    P = "p"
    VPE = "vpe"


class ProcessType(enum.IntEnum):
    ID_CHECK = 1
    FLASH = 2
    CONFIGURATION = 3
    CALCOM = 4

    @property
    def slug(self) -> str:
        return _PROCESS_SLUGS[self]

    @classmethod
    def parse(cls, text: str) -> "ProcessType":
        key = text.strip().lower().replace(" ", "_").replace("-", "_")
        for proc, aliases in _PROCESS_ALIASES.items():
            if key in aliases:
                return proc
        raise ValueError(f"unknown process {text!r}")


_PROCESS_SLUGS = {
    ProcessType.ID_CHECK: "id_check",
    ProcessType.FLASH: "flash",
    ProcessType.CONFIGURATION: "configuration",
    ProcessType.CALCOM: "calcom",
}
_PROCESS_ALIASES = {
    ProcessType.ID_CHECK: {"id_check", "idcheck", "p1"},
    ProcessType.FLASH: {"flash", "software_flash", "p2"},
    ProcessType.CONFIGURATION: {"configuration", "config", "p3"},
    ProcessType.CALCOM: {"calcom", "cal_com", "calibration", "commissioning", "p4"},
}


@dataclass(frozen=True)
class Ecu:
    id: str
    name: str
    bus: BusType
    diagnostic_address: int
    dc: DiagnosticClass
    terminal: Terminal = Terminal.T15
    master_id: Optional[str] = None
    is_cold_starter: bool = False
    is_terminator: bool = False
    hv_required: bool = False


@dataclass(frozen=True)
class Station:
    index: int
    power: PowerLevel = PowerLevel.EXTERNAL
    hv_capable: bool = False
    signal_caps: frozenset = frozenset()

    @property
    def powered(self) -> bool:
        return self.power is PowerLevel.EXTERNAL


@dataclass(frozen=True)
class Task:
    ecu_id: str
    process: ProcessType
    duration_s: int
    needs_v: bool = False
    needs_p: bool = False
    needs_vpe: bool = False
    needs_hv: bool = False
    sub_op_count: int = 1
    # advisory only; the scheduler never reads it
    planned_station: Optional[int] = field(default=None, compare=False)

    @property
    def key(self) -> tuple[str, ProcessType]:
        return (self.ecu_id, self.process)

    @property
    def required_signals(self) -> frozenset:
        flags = ((self.needs_v, Signal.V), (self.needs_p, Signal.P), (self.needs_vpe, Signal.VPE))
        return frozenset(sig for on, sig in flags if on)


@dataclass(frozen=True)
class Instance:
    topology: tuple
    stations: tuple
    assembly: Mapping[str, int]
    tasks: tuple
    derivative: str = ""
    ct_s: int = 88

    def __post_init__(self) -> None:
        object.__setattr__(self, "topology", tuple(self.topology))
        object.__setattr__(self, "stations", tuple(self.stations))
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "assembly", dict(self.assembly))

    @cached_property
    def ecus(self) -> dict[str, Ecu]:
        return {ecu.id: ecu for ecu in self.topology}

    @cached_property
    def station_map(self) -> dict[int, Station]:
        return {st.index: st for st in self.stations}

    @cached_property
    def station_indices(self) -> list[int]:
        return sorted(self.station_map)

    @cached_property
    def buses(self) -> list[BusType]:
        """Bus types present in the topology, in enum order."""
        return sorted({ecu.bus for ecu in self.topology})

    @cached_property
    def task_map(self) -> dict[tuple[str, ProcessType], Task]:
        return {task.key: task for task in self.tasks}

    @cached_property
    def processes_of(self) -> dict[str, list[ProcessType]]:
        out: dict[str, list[ProcessType]] = defaultdict(list)
        for task in self.tasks:
            out[task.ecu_id].append(task.process)
        return {k: sorted(v) for k, v in out.items()}

    @cached_property
    def assembled_on_bus(self) -> dict[tuple[BusType, int], list[str]]:
        """ECU ids assembled at each (bus, station)."""
        out: dict[tuple[BusType, int], list[str]] = defaultdict(list)
        for ecu in self.topology:
            st = self.assembly.get(ecu.id)
            if st is not None:
                out[(ecu.bus, st)].append(ecu.id)
        return dict(out)

    @cached_property
    def slaves_of(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = defaultdict(list)
        for ecu in self.topology:
            if ecu.master_id is not None:
                out[ecu.master_id].append(ecu.id)
        return dict(out)

    @cached_property
    def ids_by_name(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = defaultdict(list)
        for ecu in self.topology:
            out[ecu.name].append(ecu.id)
        return dict(out)

    @cached_property
    def ready_stations(self) -> dict[BusType, Optional[int]]:
        return {bus: bus_ready_station(self, bus) for bus in BusType}

    @cached_property
    def exclusion_partners(self) -> dict[str, frozenset]:
        """ECUs whose tasks may not share a station on a different bus.

        A DC0-DC2 slave conflicts with its master (including same-named
        entries of the master on other buses) and with sibling slaves.
        The relation is symmetric.
        """
        out: dict[str, set] = defaultdict(set)
        for ecu in self.topology:
            if ecu.dc > DiagnosticClass.DC2 or ecu.master_id not in self.ecus:
                continue
            master = self.ecus[ecu.master_id]
            group = set(self.ids_by_name.get(master.name, ())) | set(self.slaves_of.get(master.id, ()))
            group.discard(ecu.id)
            for other_id in group:
                if self.ecus[other_id].bus is not ecu.bus:
                    out[ecu.id].add(other_id)
                    out[other_id].add(ecu.id)
        return {k: frozenset(v) for k, v in out.items()}


@dataclass(frozen=True, order=True)
class TopologyIssue:
    subject: str
    rule: str
    detail: str = ""


def _kth_smallest(values: list[int], k: int) -> Optional[int]:
    values = sorted(values)
    return values[k - 1] if len(values) >= k else None


def validate_topology(topology, stations) -> list[TopologyIssue]:
    """Return every structural violation, sorted by subject then rule.

    ECU issues use the ECU id as subject, bus-level issues ``bus:<name>``
    and station issues ``station:<index>``.
    """
    issues: list[TopologyIssue] = []
    by_id: dict[str, Ecu] = {}
    for ecu in topology:
        if ecu.id in by_id:
            issues.append(TopologyIssue(ecu.id, "DuplicateEcuId"))
        by_id[ecu.id] = ecu

    for ecu in topology:
        if not 0 <= ecu.diagnostic_address <= 0xFF:
            issues.append(TopologyIssue(ecu.id, "DiagnosticAddressRange", hex(ecu.diagnostic_address)))
        if ecu.dc <= DiagnosticClass.DC2 and ecu.master_id is None:
            issues.append(TopologyIssue(ecu.id, "MasterMissing", f"DC{int(ecu.dc)} needs a master"))
        if ecu.dc >= DiagnosticClass.DC3 and ecu.master_id is not None:
            issues.append(TopologyIssue(ecu.id, "UnexpectedMaster", f"DC{int(ecu.dc)} is standalone"))
        if ecu.master_id is not None:
            master = by_id.get(ecu.master_id)
            if master is None:
                issues.append(TopologyIssue(ecu.id, "MasterUnknown", ecu.master_id))
            else:
                if master.dc != DiagnosticClass.DC4:
                    issues.append(TopologyIssue(ecu.id, "MasterNotDC4", f"{master.id} is DC{int(master.dc)}"))
                if master.bus != ecu.bus:
                    issues.append(TopologyIssue(ecu.id, "MasterBusMismatch", f"{master.id} on {master.bus.value}"))
        if ecu.is_cold_starter and ecu.bus is not BusType.FLEXRAY:
            issues.append(TopologyIssue(ecu.id, "ColdStarterNotFlexRay", ecu.bus.value))
        if ecu.is_terminator and ecu.bus not in (BusType.CAN, BusType.FLEXRAY):
            issues.append(TopologyIssue(ecu.id, "TerminatorBusInvalid", ecu.bus.value))

    per_bus: dict[BusType, list[Ecu]] = defaultdict(list)
    for ecu in topology:
        per_bus[ecu.bus].append(ecu)
    for bus, members in per_bus.items():
        subject = f"bus:{bus.value}"
        if bus in (BusType.CAN, BusType.FLEXRAY):
            n_term = sum(e.is_terminator for e in members)
            if n_term < 2:
                rule = "CanTerminatorCount" if bus is BusType.CAN else "FlexRayTerminatorCount"
                issues.append(TopologyIssue(subject, rule, f"{n_term} terminator(s)"))
        if bus is BusType.FLEXRAY:
            n_cold = sum(e.is_cold_starter for e in members)
            if n_cold < 2:
                issues.append(TopologyIssue(subject, "FlexRayColdStarterCount", f"{n_cold} cold starter(s)"))
        if bus is BusType.LIN:
            n_master = sum(e.dc == DiagnosticClass.DC4 for e in members)
            if n_master != 1:
                issues.append(TopologyIssue(subject, "LinMasterCount", f"{n_master} DC4 ECU(s)"))

    counts = Counter(st.index for st in stations)
    for index, n in counts.items():
        if n > 1:
            issues.append(TopologyIssue(f"station:{index}", "DuplicateStation"))
    expected = set(range(1, len(counts) + 1))
    for index in sorted(set(counts) - expected):
        issues.append(TopologyIssue(f"station:{index}", "StationIndexGap", "indices must run 1..n"))

    return sorted(issues)


def validate_instance(instance: Instance) -> list[TopologyIssue]:
    """Topology checks plus task/assembly cross-references."""
    issues = validate_topology(instance.topology, instance.stations)
    ecus = instance.ecus
    stations = instance.station_map
    seen: set = set()
    for task in instance.tasks:
        if task.ecu_id not in ecus:
            issues.append(TopologyIssue(task.ecu_id, "TaskUnknownEcu", task.process.slug))
        if task.key in seen:
            issues.append(TopologyIssue(task.ecu_id, "DuplicateTask", task.process.slug))
        seen.add(task.key)
        if task.sub_op_count > 1 and task.process is not ProcessType.CALCOM:
            issues.append(TopologyIssue(task.ecu_id, "SubOpsOutsideCalCom", task.process.slug))
        if task.duration_s < 0:
            issues.append(TopologyIssue(task.ecu_id, "NegativeDuration", task.process.slug))
    for ecu_id, st in instance.assembly.items():
        if st not in stations:
            issues.append(TopologyIssue(ecu_id, "AssemblyStationUnknown", str(st)))
    return sorted(issues)


def bus_ready_station(instance: Instance, bus: BusType) -> Optional[int]:
    """Earliest station from which ``bus`` has its infrastructure assembled.

    ``None`` means the bus never becomes ready on this line.
    """
    members = [e for e in instance.topology if e.bus is bus]
    asm = instance.assembly

    def stations_of(ecus) -> list:
        return [asm[e.id] if e.id in asm else None for e in ecus]

    def kth(ecus, k) -> Optional[int]:
        sts = stations_of(ecus)
        if sum(s is not None for s in sts) < k:
            return None
        return _kth_smallest([s for s in sts if s is not None], k)

    first = instance.station_indices[0] if instance.stations else 1
    if bus is BusType.LVDS:
        return first
    if bus in (BusType.CAN, BusType.FLEXRAY):
        ready = kth([e for e in members if e.is_terminator], 2)
        if ready is None:
            return None
        if bus is BusType.FLEXRAY:
            cold = kth([e for e in members if e.is_cold_starter], 2)
            if cold is None:
                return None
            ready = max(ready, cold)
        return ready
    masters = [e for e in members if e.dc == DiagnosticClass.DC4]
    if bus is BusType.LIN:
        return kth(masters, 1)
    # MOST: plug-and-play ring, only the master has to be present
    if not masters:
        return first
    return kth(masters, 1)
