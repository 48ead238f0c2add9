import json
from collections import defaultdict

import pytest
from hypothesis import given, settings, strategies as st

from builders import CAN, CONF, EXT, FLASH, ID, LIN, LVDS, NONE, can_pair, ecu, instance, line, station, task
from conftest import FIXTURES
from dvcsched.constraints import ScheduleState, replay
from dvcsched.errors import EmptySchedule, Infeasible
from dvcsched.instance_io import load_instance
from dvcsched.model import ProcessType
from dvcsched.scheduler import (
    SchedulerParams,
    baseline_sequential,
    compute_metrics,
    make_schedule,
    objective,
    schedule,
    task_order,
)
from dvcsched.synth import SMALL_PROFILE, gen_instance

EXPECTED = json.loads((FIXTURES / "seed42_expected.json").read_text())


def built(state, inst, ct=88):
    return make_schedule(state, inst, SchedulerParams(ct_override=ct))


class TestSchedule:
    def test_empty_task_list(self):
        s = schedule(instance(can_pair(), line(3)))
        assert s.station_count == 0 and s.f == 0
        assert set(s.z.values()) == {0}

    def test_gateway_example(self):
        topo = can_pair("gateway", "t2")
        stations = [station(i, NONE) for i in range(1, 12)] + [station(12, EXT), station(13, EXT)]
        inst = instance(topo, stations, assembly={"gateway": 12, "t2": 10}, tasks=[task("gateway", ID, 20)])
        s = schedule(inst)
        assert s.state.assigned == {("gateway", ID): 12}
        assert s.state.cumulative(CAN, 12) == 20
        assert s.station_count == 1 and sum(s.z.values()) == 1
        assert s.f == 1_000_020

    def test_vpe_unavailable(self):
        inst = instance(can_pair(), line(4, caps=["v", "p"]), tasks=[task("gw", ID, vpe=True)])
        with pytest.raises(Infeasible) as info:
            schedule(inst)
        assert info.value.task_key == ("gw", "id_check")
        assert sum(info.value.histogram.values()) == 4

    def test_parallel_buses_share_a_station(self):
        topo = can_pair() + [ecu("cam", LVDS, 3)]
        inst = instance(topo, line(3), tasks=[task("gw", ID, 40), task("cam", ID, 40)])
        assert schedule(inst).station_count == 1
        assert baseline_sequential(inst).station_count == 2

    def test_process_chain_moves_downstream_when_full(self):
        inst = instance(can_pair(), line(3), tasks=[task("gw", ID, 50), task("t2", ID, 50)])
        s = schedule(inst)
        assert s.state.assigned == {("gw", ID): 1, ("t2", ID): 2}

    def test_task_order_puts_id_checks_first(self):
        inst = instance(can_pair(), line(3), tasks=[task("t2", CONF), task("gw", FLASH), task("gw", ID), task("t2", ID)])
        procs = [t.process for t in task_order(inst)]
        assert procs == sorted(procs)

    def test_ct_override(self):
        inst = instance(can_pair(), line(3), tasks=[task("gw", ID, 50), task("t2", ID, 50)])
        s = schedule(inst, SchedulerParams(ct_override=100))
        assert s.station_count == 1 and s.ct_s == 100

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            SchedulerParams(alpha=-1)


class TestObjective:
    def test_empty(self):
        assert objective(built(ScheduleState(), instance(can_pair(), line(2))), 1e6, 1) == 0

    def test_one_station(self):
        inst = instance(can_pair(), line(2), tasks=[task("gw", ID, 20)])
        st_ = ScheduleState()
        st_.place(inst.tasks[0], CAN, 1)
        assert objective(built(st_, inst), 1e6, 1) == 1_000_020


def lin_can():
    return can_pair() + [ecu("lm", LIN, 4), ecu("ls", LIN, 3, master="lm")]


class TestMetrics:
    def test_half_and_half(self):
        inst = instance(lin_can(), line(2), tasks=[task("gw", ID, 44)])
        st_ = ScheduleState()
        st_.place(inst.tasks[0], CAN, 1)
        m = compute_metrics(built(st_, inst), inst)
        assert m.U == pytest.approx(0.5, abs=1e-9) and m.P == pytest.approx(0.5, abs=1e-9)

    def test_saturated(self):
        tasks = [task("gw", ID, 88), task("lm", ID, 88), task("t2", ID, 88), task("ls", ID, 88)]
        inst = instance(lin_can(), line(2), tasks=tasks)
        st_ = ScheduleState()
        for t, (bus, s) in zip(tasks, [(CAN, 1), (LIN, 1), (CAN, 2), (LIN, 2)]):
            st_.place(t, bus, s)
        m = compute_metrics(built(st_, inst), inst)
        assert m.U == pytest.approx(2.0, abs=1e-9) and m.P == pytest.approx(1.0, abs=1e-9)

    def test_mixed(self):
        tasks = [task("gw", ID, 22), task("lm", ID, 44), task("t2", ID, 11)]
        inst = instance(lin_can(), line(3), tasks=tasks)
        st_ = ScheduleState()
        for t, (bus, s) in zip(tasks, [(CAN, 1), (LIN, 1), (CAN, 3)]):
            st_.place(t, bus, s)
        m = compute_metrics(built(st_, inst), inst)
        # station 1: 22/88 + 44/88, both buses; station 3: 11/88, one bus
        assert m.U == pytest.approx((0.75 + 0.125) / 2, abs=1e-9)
        assert m.P == pytest.approx((1.0 + 0.5) / 2, abs=1e-9)

    def test_empty_schedule(self):
        inst = instance(can_pair(), line(2))
        with pytest.raises(EmptySchedule):
            compute_metrics(built(ScheduleState(), inst), inst)

    def test_seed42_spreadsheet_recompute(self):
        inst = load_instance(FIXTURES / "seed42")
        s = schedule(inst)
        cd = defaultdict(lambda: defaultdict(int))
        for row in s.assignments():
            cd[row["station"]][row["bus"]] += row["duration_s"]
        n_bus = len({e.bus for e in inst.topology})
        u = sum(sum(v / inst.ct_s for v in buses.values()) for buses in cd.values()) / len(cd)
        p = sum(len(buses) / n_bus for buses in cd.values()) / len(cd)
        m = compute_metrics(s, inst)
        assert m.U == pytest.approx(u, abs=1e-9) and m.P == pytest.approx(p, abs=1e-9)
        assert m.U == pytest.approx(EXPECTED["U"], abs=1e-9) and m.P == pytest.approx(EXPECTED["P"], abs=1e-9)
        assert (s.station_count, s.f) == (EXPECTED["greedy_stations"], EXPECTED["greedy_f"])


class TestBaseline:
    def test_empty(self):
        assert baseline_sequential(instance(can_pair(), line(2))).station_count == 0

    def test_single_task_identical(self):
        inst = instance(can_pair(), line(3), tasks=[task("t2", ID, 30)])
        a, b = schedule(inst), baseline_sequential(inst)
        assert a.state.assigned == b.state.assigned and a.f == b.f


@settings(max_examples=30)
@given(st.integers(1, 10_000))
def test_greedy_invariants(seed):
    inst = gen_instance(seed, SMALL_PROFILE)
    s = schedule(inst)
    assert replay(inst, s.state) == []
    assert all(cd <= inst.ct_s for cd in s.state.cd.values())
    for e in inst.topology:
        stations = [s.state.assigned[(e.id, p)] for p in ProcessType if (e.id, p) in s.state.assigned]
        assert stations == sorted(stations)
    assert len(s.state.assigned) == len(inst.tasks)
