"""Precedence graph over scheduled DVC tasks, with DAG check and DOT/JSON export.

Assembly events are not nodes. A bus whose readiness depends on assembled
infrastructure gets a pseudo-anchor ``ready/<bus>@<station>``; its
``BusReadiness`` edge points at the first task on that bus, and the task node
records the anchor in ``ready_anchor``.
"""

from __future__ import annotations

import enum
import graphlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .constraints import ScheduleState, master_prerequisite, replay
from .errors import DataError, InfeasibleSchedule
from .model import BusType, DiagnosticClass, Instance, ProcessType
from .scheduler import Schedule

GRAPH_VERSION = "pg-v1"


class EdgeKind(enum.Enum):
    PROCESS_ORDER = "ProcessOrder"
    MASTER_DEPENDENCY = "MasterDependency"
    BUS_READINESS = "BusReadiness"
    STATION_FLOW = "StationFlow"


@dataclass(frozen=True)
class Node:
    ecu: str
    process: ProcessType
    station: int
    bus: BusType
    seq: int
    ready_anchor: Optional[str] = None

    @property
    def id(self) -> str:
        return node_id(self.ecu, self.process)

    @property
    def label(self) -> str:
        return f"{self.id}@{self.station}"


@dataclass(frozen=True)
class Anchor:
    bus: BusType
    station: int

    @property
    def id(self) -> str:
        return f"ready/{self.bus.value}@{self.station}"


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind


@dataclass
class PrecedenceGraph:
    nodes: list[Node] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)
    anchors: list[Anchor] = field(default_factory=list)

    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    def vertex_ids(self) -> list[str]:
        return [a.id for a in self.anchors] + [n.id for n in self.nodes]

    def topological_order(self) -> list[Node]:
        """Stations ascending, then bus, then sequence position.

        Every edge points forward in this order, so it is a topological order.
        """
        return sorted(self.nodes, key=lambda n: (n.station, n.bus.rank, n.seq))


def node_id(ecu: str, process: ProcessType) -> str:
    return f"{ecu}/{process.slug}"


def _enabled_by_assembly(instance: Instance, bus: BusType) -> bool:
    if bus is BusType.LVDS:
        return False
    if bus is BusType.MOST:
        return any(e.bus is bus and e.dc == DiagnosticClass.DC4 for e in instance.topology)
    return True


def build_precedence_graph(instance: Instance, schedule: Schedule | ScheduleState) -> PrecedenceGraph:
    state = schedule.state if isinstance(schedule, Schedule) else schedule
    violations = replay(instance, state)
    if violations:
        first = violations[0]
        raise InfeasibleSchedule(
            f"{len(violations)} violation(s), first {first.rule.value} for {first.ecu_id} at station {first.station}"
        )

    nodes: dict[tuple, Node] = {}
    first_on_bus: dict[BusType, tuple] = {}
    for (bus, station), seq in sorted(state.sequences.items(), key=lambda kv: (kv[0][1], kv[0][0].rank)):
        for pos, key in enumerate(seq):
            nodes[key] = Node(key[0], key[1], station, bus, pos)
            first_on_bus.setdefault(bus, key)

    anchors = []
    edges: list[Edge] = []
    for bus in sorted(first_on_bus, key=lambda b: b.rank):
        ready = instance.ready_stations.get(bus)
        if ready is None or not _enabled_by_assembly(instance, bus):
            continue
        anchor = Anchor(bus, ready)
        anchors.append(anchor)
        key = first_on_bus[bus]
        nodes[key] = Node(key[0], key[1], nodes[key].station, bus, nodes[key].seq, anchor.id)
        edges.append(Edge(anchor.id, nodes[key].id, EdgeKind.BUS_READINESS))

    by_ecu: dict[str, list[ProcessType]] = {}
    for ecu, proc in nodes:
        by_ecu.setdefault(ecu, []).append(proc)
    for ecu, procs in by_ecu.items():
        procs.sort()
        for a, b in zip(procs, procs[1:]):
            edges.append(Edge(node_id(ecu, a), node_id(ecu, b), EdgeKind.PROCESS_ORDER))

    for key, node in nodes.items():
        prereq = master_prerequisite(instance, instance.task_map[key])
        if prereq is not None and prereq[1] in nodes:
            edges.append(Edge(nodes[prereq[1]].id, node.id, EdgeKind.MASTER_DEPENDENCY))

    for seq in state.sequences.values():
        for a, b in zip(seq, seq[1:]):
            edges.append(Edge(nodes[a].id, nodes[b].id, EdgeKind.STATION_FLOW))

    ordered = sorted(nodes.values(), key=lambda n: (n.station, n.bus.rank, n.seq))
    edges.sort(key=lambda e: (e.src, e.dst, e.kind.value))
    return PrecedenceGraph(ordered, edges, anchors)


def check_dag(graph: PrecedenceGraph) -> tuple[bool, Optional[list[str]]]:
    """``(True, None)`` if a topological order exists, else ``(False, cycle)``
    where ``cycle`` lists each vertex of one cycle once."""
    sorter = graphlib.TopologicalSorter()
    for v in graph.vertex_ids():
        sorter.add(v)
    for e in graph.edges:
        sorter.add(e.dst, e.src)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        # graphlib follows edge direction and repeats the start vertex at the end
        return False, list(exc.args[1][:-1])
    return True, None


def edge_invariant_violations(graph: PrecedenceGraph) -> list[Edge]:
    """Edges that run upstream, or sideways without a same-bus sequence order."""
    nodes = graph.node_map()
    anchors = {a.id: a for a in graph.anchors}
    bad = []
    for e in graph.edges:
        dst = nodes.get(e.dst)
        src = nodes.get(e.src) or anchors.get(e.src)
        if src is None or dst is None or e.src == e.dst:
            bad.append(e)
            continue
        src_seq = src.seq if isinstance(src, Node) else -1
        if src.station > dst.station:
            bad.append(e)
        elif src.station == dst.station and (src.bus is not dst.bus or src_seq >= dst.seq):
            bad.append(e)
    return bad


# export --------------------------------------------------------------------

def to_json(graph: PrecedenceGraph) -> dict:
    return {
        "version": GRAPH_VERSION,
        "nodes": [
            {"id": n.id, "ecu": n.ecu, "process": n.process.slug, "station": n.station,
             "bus": n.bus.value, "seq": n.seq, "ready_anchor": n.ready_anchor}
            for n in graph.nodes
        ],
        "anchors": [{"id": a.id, "bus": a.bus.value, "station": a.station} for a in graph.anchors],
        "edges": [{"from": e.src, "to": e.dst, "kind": e.kind.value} for e in graph.edges],
    }


def from_json(doc: dict) -> PrecedenceGraph:
    if doc.get("version") != GRAPH_VERSION:
        raise DataError(f"unsupported graph version {doc.get('version')!r}")
    try:
        nodes = [
            Node(n["ecu"], ProcessType.parse(n["process"]), int(n["station"]), BusType.parse(n["bus"]),
                 int(n["seq"]), n.get("ready_anchor"))
            for n in doc["nodes"]
        ]
        anchors = [Anchor(BusType.parse(a["bus"]), int(a["station"])) for a in doc["anchors"]]
        edges = [Edge(e["from"], e["to"], EdgeKind(e["kind"])) for e in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed graph document: {exc}") from exc
    return PrecedenceGraph(nodes, edges, anchors)


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: PrecedenceGraph) -> str:
    lines = ["digraph precedence {", "  rankdir=LR;"]
    stations = sorted({n.station for n in graph.nodes} | {a.station for a in graph.anchors})
    for s in stations:
        lines.append(f"  subgraph cluster_s{s} {{")
        lines.append(f'    label="station {s}";')
        for a in graph.anchors:
            if a.station == s:
                lines.append(f'    {_q(a.id)} [shape=point, bus={_q(a.bus.value)}];')
        for n in graph.nodes:
            if n.station == s:
                lines.append(f"    {_q(n.id)} [label={_q(n.label)}, bus={_q(n.bus.value)}];")
        lines.append("  }")
    for e in graph.edges:
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)} [kind={_q(e.kind.value)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(graph: PrecedenceGraph, fmt: str) -> bytes:
    fmt = fmt.lower()
    if fmt == "dot":
        return to_dot(graph).encode()
    if fmt == "json":
        return (json.dumps(to_json(graph), indent=2, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown graph format {fmt!r}")


def parse_json(data: bytes | str) -> PrecedenceGraph:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DataError(f"graph JSON: {exc}") from exc
    return from_json(doc)
