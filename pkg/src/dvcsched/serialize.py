"""JSON documents for instances and schedules.

A schedule document ("sched-v1") embeds its instance, so the precedence
graph can be rebuilt from the schedule file alone.
"""

from __future__ import annotations

import json

from .constraints import ScheduleState
from .errors import DataError
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
)
from .scheduler import Schedule, SchedulerParams, compute_metrics, make_schedule

SCHEDULE_VERSION = "sched-v1"


def instance_to_json(instance: Instance) -> dict:
    return {
        "derivative": instance.derivative,
        "ct_s": instance.ct_s,
        "topology": [
            {"id": e.id, "name": e.name, "bus": e.bus.value, "da": e.diagnostic_address, "dc": int(e.dc),
             "terminal": e.terminal.value, "master": e.master_id, "cold_starter": e.is_cold_starter,
             "terminator": e.is_terminator, "hv": e.hv_required}
            for e in instance.topology
        ],
        "stations": [
            {"index": s.index, "power": s.power.value, "hv": s.hv_capable,
             "signals": [sig.value for sig in Signal if sig in s.signal_caps]}
            for s in instance.stations
        ],
        "assembly": {k: instance.assembly[k] for k in sorted(instance.assembly)},
        "tasks": [
            {"ecu": t.ecu_id, "process": t.process.slug, "duration_s": t.duration_s, "needs_v": t.needs_v,
             "needs_p": t.needs_p, "needs_vpe": t.needs_vpe, "needs_hv": t.needs_hv,
             "sub_ops": t.sub_op_count, "planned_station": t.planned_station}
            for t in instance.tasks
        ],
    }


def instance_from_json(doc: dict) -> Instance:
    try:
        topology = [
            Ecu(e["id"], e["name"], BusType.parse(e["bus"]), int(e["da"]), DiagnosticClass(e["dc"]),
                Terminal(e["terminal"]), e["master"], bool(e["cold_starter"]), bool(e["terminator"]), bool(e["hv"]))
            for e in doc["topology"]
        ]
        stations = [
            Station(int(s["index"]), PowerLevel(s["power"]), bool(s["hv"]), frozenset(Signal(x) for x in s["signals"]))
            for s in doc["stations"]
        ]
        tasks = [
            Task(t["ecu"], ProcessType.parse(t["process"]), int(t["duration_s"]), bool(t["needs_v"]),
                 bool(t["needs_p"]), bool(t["needs_vpe"]), bool(t["needs_hv"]), int(t["sub_ops"]),
                 t.get("planned_station"))
            for t in doc["tasks"]
        ]
        return Instance(topology, stations, {k: int(v) for k, v in doc["assembly"].items()}, tasks,
                        doc.get("derivative", ""), int(doc.get("ct_s", 88)))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed instance document: {exc}") from exc


def schedule_to_json(schedule: Schedule, instance: Instance, algorithm: str = "greedy") -> dict:
    metrics = compute_metrics(schedule, instance)
    z = schedule.z
    stations = [
        {"index": s, "z": z[s],
         "cd": {b.value: schedule.state.cumulative(b, s) for b in schedule.buses if schedule.state.sequence(b, s)}}
        for s in schedule.station_indices
    ]
    return {
        "version": SCHEDULE_VERSION,
        "algorithm": algorithm,
        "assignments": [
            {**row, "process": row["process"].slug, "bus": row["bus"].value} for row in schedule.assignments()
        ],
        "stations": stations,
        "metrics": {
            "stations": schedule.station_count,
            "U": metrics.U,
            "P": metrics.P,
            "f": schedule.f,
            "alpha": schedule.alpha,
            "beta": schedule.beta,
            "ct_s": schedule.ct_s,
        },
        "instance": instance_to_json(instance),
    }


def schedule_from_json(doc: dict) -> tuple[Instance, Schedule]:
    """Rebuild the instance and the schedule; sequences keep document order."""
    if doc.get("version") != SCHEDULE_VERSION:
        raise DataError(f"unsupported schedule version {doc.get('version')!r}")
    if "instance" not in doc:
        raise DataError("schedule document has no embedded instance")
    instance = instance_from_json(doc["instance"])
    state = ScheduleState()
    try:
        for row in doc["assignments"]:
            key = (row["ecu"], ProcessType.parse(row["process"]))
            task = instance.task_map.get(key)
            if task is None:
                raise DataError(f"assignment for unknown task {row['ecu']}/{row['process']}")
            state.place(task, BusType.parse(row["bus"]), int(row["station"]))
        m = doc["metrics"]
        params = SchedulerParams(float(m["alpha"]), float(m["beta"]), int(m["ct_s"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed schedule document: {exc}") from exc
    return instance, make_schedule(state, instance, params)


def dumps(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def loads(data: bytes | str, what: str = "document") -> dict:
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise DataError(f"{what}: {exc}") from exc


def read_schedule(data: bytes | str) -> tuple[Instance, Schedule]:
    return schedule_from_json(loads(data, "schedule"))
