"""Regenerate the pinned test fixtures.

Run once after a reviewed change to the generator or the oracle; the tests
compare against these files, so the diff of this script's output is the
review surface.

    python3 tools/pin_fixtures.py
"""

from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path

from dvcsched.graph import build_precedence_graph, export
from dvcsched.instance_io import load_instance, write_instance_dir
from dvcsched.oracle import oracle_optimal
from dvcsched.scheduler import compute_metrics, schedule
from dvcsched.serialize import dumps, schedule_to_json
from dvcsched.synth import FIXTURE_PROFILE, SMALL_PROFILE, gen_instance

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def pin_small() -> dict:
    seeds = {}
    for seed in range(1, 21):
        inst = gen_instance(seed, SMALL_PROFILE)
        best = oracle_optimal(inst)
        seeds[str(seed)] = {
            "tasks": len(inst.tasks),
            "stations": len(inst.stations),
            "oracle_f": best.f,
            "oracle_stations": best.station_count,
        }
    return {"profile": SMALL_PROFILE.to_json(), "seeds": seeds}


def pin_seed42() -> dict:
    target = FIXTURES / "seed42"
    if target.exists():
        shutil.rmtree(target)
    inst = gen_instance(42, FIXTURE_PROFILE)
    write_instance_dir(inst, target, 42, FIXTURE_PROFILE.to_json())
    inst = load_instance(target)
    best = oracle_optimal(inst)
    greedy = schedule(inst)
    graph = build_precedence_graph(inst, greedy)
    m = compute_metrics(greedy, inst)
    return {
        "seed": 42,
        "oracle_f": best.f,
        "oracle_stations": best.station_count,
        "greedy_f": greedy.f,
        "greedy_stations": greedy.station_count,
        "U": m.U,
        "P": m.P,
        "graph_nodes": len(graph.nodes),
        "graph_edges": len(graph.edges),
        "graph_edges_by_kind": {
            k: sum(e.kind.value == k for e in graph.edges)
            for k in sorted({e.kind.value for e in graph.edges})
        },
        "sha256": {
            "schedule.json": _sha(dumps(schedule_to_json(greedy, inst))),
            "graph.dot": _sha(export(graph, "dot")),
            "graph.json": _sha(export(graph, "json")),
        },
    }


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name, doc in (("oracle_small.json", pin_small()), ("seed42_expected.json", pin_seed42())):
        (FIXTURES / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {FIXTURES / name}")


if __name__ == "__main__":
    main()
