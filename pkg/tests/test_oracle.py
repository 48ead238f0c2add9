import json

import pytest

from builders import CAN, ID, LVDS, can_pair, ecu, instance, line, task
from conftest import FIXTURES
from dvcsched.constraints import replay
from dvcsched.errors import TooLarge
from dvcsched.instance_io import load_instance
from dvcsched.oracle import MAX_STATIONS, MAX_TASKS, oracle_optimal
from dvcsched.scheduler import schedule
from dvcsched.synth import SMALL_PROFILE, Profile, gen_instance

PINNED = json.loads((FIXTURES / "oracle_small.json").read_text())


def test_pinned_profile_is_current():
    assert Profile.from_json(PINNED["profile"]) == SMALL_PROFILE


@pytest.mark.parametrize("seed", range(1, 21))
def test_pinned_small_instances(seed):
    pin = PINNED["seeds"][str(seed)]
    inst = gen_instance(seed, SMALL_PROFILE)
    assert (len(inst.tasks), len(inst.stations)) == (pin["tasks"], pin["stations"])
    assert len(inst.tasks) <= MAX_TASKS and len(inst.stations) <= MAX_STATIONS
    best = oracle_optimal(inst)
    assert (best.f, best.station_count) == (pin["oracle_f"], pin["oracle_stations"])
    assert replay(inst, best.state) == []
    assert schedule(inst).f >= best.f


def test_single_task_same_station_as_greedy():
    inst = instance(can_pair(), line(4), assembly={"gw": 2, "t2": 3}, tasks=[task("gw", ID, 30)])
    assert oracle_optimal(inst).state.assigned == schedule(inst).state.assigned == {("gw", ID): 3}


def test_independent_buses_share_earliest_station():
    topo = can_pair() + [ecu("cam", LVDS, 3)]
    inst = instance(topo, line(4), assembly={"gw": 2, "t2": 2, "cam": 1},
                    tasks=[task("gw", ID, 40), task("cam", ID, 40)])
    best = oracle_optimal(inst)
    assert best.state.assigned == {("gw", ID): 2, ("cam", ID): 2}
    assert best.station_count == 1


def test_oracle_can_beat_first_fit():
    # first-fit never delays a task to pack it with later work; seed 1 shows the cost
    inst = gen_instance(1, SMALL_PROFILE)
    assert oracle_optimal(inst).station_count == 2
    assert schedule(inst).station_count == 3


def test_seed42_fixture_matches_pin():
    expected = json.loads((FIXTURES / "seed42_expected.json").read_text())
    inst = load_instance(FIXTURES / "seed42")
    best = oracle_optimal(inst)
    assert (best.f, best.station_count) == (expected["oracle_f"], expected["oracle_stations"])
    assert schedule(inst).station_count == best.station_count


def test_too_many_tasks():
    topo = [ecu(f"e{i}", LVDS, 3) for i in range(MAX_TASKS + 1)]
    inst = instance(topo, line(3), tasks=[task(e.id) for e in topo])
    with pytest.raises(TooLarge):
        oracle_optimal(inst)


def test_too_many_stations():
    inst = instance(can_pair(), line(MAX_STATIONS + 1), tasks=[task("gw")])
    with pytest.raises(TooLarge):
        oracle_optimal(inst)
