import json

import pytest
from hypothesis import given, settings, strategies as st

from dvcsched.errors import DataError
from dvcsched.graph import build_precedence_graph, export
from dvcsched.scheduler import compute_metrics, schedule
from dvcsched.serialize import (
    SCHEDULE_VERSION,
    dumps,
    instance_from_json,
    instance_to_json,
    read_schedule,
    schedule_to_json,
)
from dvcsched.synth import SMALL_PROFILE, gen_instance


@settings(max_examples=15)
@given(st.integers(1, 5000))
def test_schedule_round_trip(seed):
    inst = gen_instance(seed, SMALL_PROFILE)
    s = schedule(inst)
    data = dumps(schedule_to_json(s, inst))
    inst2, s2 = read_schedule(data)
    assert instance_to_json(inst2) == instance_to_json(inst)
    assert s2.state.sequences == s.state.sequences and s2.f == s.f
    assert dumps(schedule_to_json(s2, inst2)) == data
    assert export(build_precedence_graph(inst2, s2), "json") == export(build_precedence_graph(inst, s), "json")


def test_document_shape():
    inst = gen_instance(3, SMALL_PROFILE)
    s = schedule(inst)
    doc = schedule_to_json(s, inst, "greedy")
    assert doc["version"] == SCHEDULE_VERSION and doc["algorithm"] == "greedy"
    assert len(doc["assignments"]) == len(inst.tasks)
    assert [st_["index"] for st_ in doc["stations"]] == inst.station_indices
    assert sum(st_["z"] for st_ in doc["stations"]) == doc["metrics"]["stations"] == s.station_count
    m = compute_metrics(s, inst)
    assert (doc["metrics"]["U"], doc["metrics"]["P"], doc["metrics"]["f"]) == (m.U, m.P, s.f)
    assert dumps(doc).endswith(b"\n")
    assert sum(sum(st_["cd"].values()) for st_ in doc["stations"]) == s.total_cd


def test_instance_round_trip():
    inst = gen_instance(9, SMALL_PROFILE)
    assert instance_to_json(instance_from_json(instance_to_json(inst))) == instance_to_json(inst)


@pytest.mark.parametrize(
    "mutate",
    [lambda d: d.update(version="sched-v0"), lambda d: d.pop("instance"), lambda d: d["assignments"][0].pop("bus"),
     lambda d: d["assignments"][0].update(ecu="ghost"), lambda d: d["instance"].pop("topology")],
)
def test_malformed_documents(mutate):
    inst = gen_instance(3, SMALL_PROFILE)
    doc = json.loads(dumps(schedule_to_json(schedule(inst), inst)))
    mutate(doc)
    with pytest.raises(DataError):
        read_schedule(json.dumps(doc))


def test_not_json():
    with pytest.raises(DataError):
        read_schedule("{nope")
