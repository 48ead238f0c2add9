"""Exhaustive depth-first optimum for small instances.

Used only to judge the greedy scheduler; it shares ``check_constraints`` but
none of the first-fit logic.
"""

from __future__ import annotations

from typing import Optional

from .constraints import ScheduleState, check_constraints
from .errors import Infeasible, TooLarge
from .model import Instance
from .scheduler import Schedule, SchedulerParams, _prepare, make_schedule, task_order

MAX_TASKS = 12
MAX_STATIONS = 10


def oracle_optimal(instance: Instance, params: SchedulerParams = SchedulerParams()) -> Schedule:
    """Minimum-objective schedule over every admissible station vector.

    Tasks are placed in :func:`task_order`; each task tries every station in
    ascending order. Because the search walks station vectors in
    lexicographic order and only accepts strict improvements, ties resolve to
    the lexicographically smallest vector.
    """
    if len(instance.tasks) > MAX_TASKS or len(instance.stations) > MAX_STATIONS:
        raise TooLarge(
            f"oracle limited to {MAX_TASKS} tasks and {MAX_STATIONS} stations "
            f"(got {len(instance.tasks)}, {len(instance.stations)})"
        )
    instance = _prepare(instance, params)
    order = task_order(instance)
    buses = [instance.ecus[t.ecu_id].bus for t in order]
    stations = instance.station_indices
    beta_total = params.beta * sum(t.duration_s for t in order)
    state = ScheduleState()
    used: dict[int, int] = {}
    best_f = float("inf")
    best: Optional[list[int]] = None
    vector: list[int] = []

    def bound() -> float:
        return params.alpha * len(used) + beta_total

    def dfs(i: int) -> None:
        nonlocal best_f, best
        if bound() >= best_f:
            return
        if i == len(order):
            best_f = bound()
            best = list(vector)
            return
        task, bus = order[i], buses[i]
        for s in stations:
            if check_constraints(task, s, state, instance):
                continue
            state.place(task, bus, s)
            used[s] = used.get(s, 0) + 1
            vector.append(s)
            dfs(i + 1)
            vector.pop()
            used[s] -= 1
            if not used[s]:
                del used[s]
            state.unplace(task, bus)

    dfs(0)
    if best is None:
        first = order[0] if order else None
        key = (first.ecu_id, first.process.slug) if first else ("", "")
        raise Infeasible(key)
    final = ScheduleState()
    for task, bus, s in zip(order, buses, best):
        final.place(task, bus, s)
    return make_schedule(final, instance, params)
