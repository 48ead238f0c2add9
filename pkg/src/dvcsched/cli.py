"""Command line entry point.

Exit codes: 0 ok, 1 usage, 2 data error, 3 infeasible, 4 internal error.
Machine output goes to stdout or ``--out`` files; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .errors import (
    DataError,
    DvcError,
    EmptyEcuList,
    EmptySchedule,
    Infeasible,
    InfeasibleProfile,
    InfeasibleSchedule,
    InsufficientCorpus,
    TooLarge,
    UnknownEcu,
    UnknownStation,
)
from .extraction import (
    FuzzyMatcher,
    NbExtractor,
    NbModel,
    RegexMatcher,
    accuracy_from_labels,
    cross_validated_labels,
    evaluate_extractor,
    train_nb,
)
from .extraction.matchers import DEFAULT_THRESHOLD
from .graph import build_precedence_graph, export
from .ingestion import SourceKind, parse_source, write_source
from .instance_io import METHODS, extract_assembly, load_instance, write_instance_dir
from .oracle import MAX_STATIONS, MAX_TASKS, oracle_optimal
from .scheduler import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    SchedulerParams,
    baseline_sequential,
    compute_metrics,
    schedule,
)
from .serialize import dumps, read_schedule, schedule_to_json
from .synth import DEFAULT_PROFILE, FIXTURE_PROFILE, SMALL_PROFILE, gen_corpus, gen_instance

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3, 4
THREADS_ENV = "DVC_SCHED_THREADS"
PROFILES = {"default": DEFAULT_PROFILE, "small": SMALL_PROFILE, "fixture": FIXTURE_PROFILE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except IsADirectoryError:
        raise DataError(f"expected a file, got a directory: {path}") from None


def _write_out(path: str, data: bytes) -> None:
    out = Path(path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True)
    out.write_bytes(data)


def _load_model(path: str) -> NbModel:
    try:
        return NbModel.from_json(_read_bytes(path).decode("utf-8"))
    except (ValueError, KeyError) as exc:
        raise DataError(f"model {path}: {exc}") from exc


def threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _params(args) -> SchedulerParams:
    try:
        return SchedulerParams(args.alpha, args.beta, args.ct)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _instance(args):
    model = _load_model(args.model) if getattr(args, "model", None) else None
    if args.method == "nb" and model is None:
        raise UsageError("--method nb needs --model")
    return load_instance(args.instance, args.method, model, args.threshold)


def _summary(sched, instance) -> str:
    m = compute_metrics(sched, instance)
    return f"stations={sched.station_count} U={m.U:.4f} P={m.P:.4f} f={sched.f:.1f}"


# commands ------------------------------------------------------------------

def cmd_extract(args) -> int:
    rows = parse_source(SourceKind.ASSEMBLY_GRAPH, _read_bytes(args.graph)).items
    topology = parse_source(SourceKind.TOPOLOGY, _read_bytes(args.topology)).items
    names = sorted({e.name for e in topology})
    if not names:
        raise EmptyEcuList("topology lists no ECUs")
    model = _load_model(args.model) if args.model else None
    if args.method == "nb" and model is None:
        raise UsageError("--method nb needs --model")
    result = extract_assembly(rows, names, args.method, model, args.threshold)
    _write_out(args.out, dumps(result.to_json()))
    _log(f"{len(result.ecu_stations)} of {len(names)} ECUs located, {len(result.powered_stations)} powered stations")
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = parse_source(SourceKind.CORPUS, _read_bytes(args.corpus)).items
    model = train_nb(corpus, args.min_rows)
    _write_out(args.out, model.to_json().encode("utf-8"))
    _log(f"trained on {len(corpus)} rows, {len(model.vocabulary)} terms")
    return EXIT_OK


def cmd_eval(args) -> int:
    corpus = parse_source(SourceKind.CORPUS, _read_bytes(args.corpus)).items
    if args.topology:
        names = sorted({e.name for e in parse_source(SourceKind.TOPOLOGY, _read_bytes(args.topology)).items})
    else:
        names = sorted({r.ecu_name for r in corpus if r.ecu_name})
    if args.method == "nb":
        if args.model:
            acc = evaluate_extractor(NbExtractor(_load_model(args.model)), corpus)
        else:
            acc = accuracy_from_labels(corpus, cross_validated_labels(corpus, args.folds, args.min_rows))
    else:
        if not names:
            raise EmptyEcuList("no ECU names: pass --topology or label assembly rows with ecu_name")
        if args.method == "fuzzy":
            extractor = FuzzyMatcher(names, threshold=args.threshold)
        else:
            extractor = RegexMatcher(names)
        acc = evaluate_extractor(extractor, corpus)
    print(f"{'method':<8}{'ecu_assembly':>14}{'powered_stations':>18}")
    print(f"{args.method:<8}{acc.ecu_assembly:>14.4f}{acc.powered_stations:>18.4f}")
    return EXIT_OK


def _run_scheduler(args, fn, name: str) -> int:
    instance = _instance(args)
    params = _params(args)
    t0 = time.perf_counter()
    sched = fn(instance, params)
    wall = time.perf_counter() - t0
    if args.ct is not None:
        instance = dataclasses.replace(instance, ct_s=args.ct)
    if args.out:
        _write_out(args.out, dumps(schedule_to_json(sched, instance, name)))
    print(_summary(sched, instance))
    _log(f"{name}: wall time {wall:.3f} s")
    return EXIT_OK


def cmd_schedule(args) -> int:
    return _run_scheduler(args, schedule, "greedy")


def cmd_baseline(args) -> int:
    return _run_scheduler(args, baseline_sequential, "baseline")


def cmd_oracle(args) -> int:
    return _run_scheduler(args, oracle_optimal, "oracle")


def cmd_graph(args) -> int:
    instance, sched = read_schedule(_read_bytes(args.schedule))
    t0 = time.perf_counter()
    graph = build_precedence_graph(instance, sched)
    data = export(graph, args.format)
    _write_out(args.out, data)
    _log(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges; wall time {time.perf_counter() - t0:.3f} s")
    return EXIT_OK


def _profile(args):
    base = PROFILES[args.profile]
    overrides = {
        "n_id": args.n_id, "n_flash": args.n_flash, "n_conf": args.n_conf, "n_calcom": args.n_calcom,
        "n_stations": args.n_stations, "ct_s": args.ct,
    }
    return dataclasses.replace(base, **{k: v for k, v in overrides.items() if v is not None})


def cmd_synth(args) -> int:
    out = Path(args.out)
    if args.what == "instance":
        profile = _profile(args)
        instance = gen_instance(args.seed, profile)
        write_instance_dir(instance, out, args.seed, profile.to_json())
        _log(f"wrote instance with {len(instance.topology)} ECUs, {len(instance.tasks)} tasks to {out}")
        return EXIT_OK
    counts = (args.assembly, args.powered, args.neither)
    if min(counts) <= 0:
        raise UsageError("class counts must be positive")
    corpus = gen_corpus(args.seed, counts)
    data = write_source(SourceKind.CORPUS, corpus)
    out.mkdir(parents=True, exist_ok=True)
    (out / "corpus.csv").write_bytes(data)
    manifest = {
        "version": "corpus-v1",
        "seed": args.seed,
        "counts": {"assembly": counts[0], "powered": counts[1], "neither": counts[2]},
        "sha256": {"corpus.csv": hashlib.sha256(data).hexdigest()},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _log(f"wrote {len(corpus)} labeled rows to {out / 'corpus.csv'}")
    return EXIT_OK


def cmd_compare(args) -> int:
    instance = _instance(args)
    params = _params(args)
    small = len(instance.tasks) <= MAX_TASKS and len(instance.stations) <= MAX_STATIONS
    variants = [("greedy", schedule), ("baseline", baseline_sequential)]
    if small:
        variants.append(("oracle", oracle_optimal))

    def run(fn):
        try:
            return fn(instance, params)
        except Infeasible as exc:
            return exc

    with ThreadPoolExecutor(max_workers=threads_from_env()) as pool:
        results = list(pool.map(run, [fn for _, fn in variants]))

    print(f"{'variant':<10}{'stations':>9}{'f':>16}{'U':>9}{'P':>9}")
    for (name, _), res in zip(variants, results):
        if isinstance(res, Infeasible):
            print(f"{name:<10}{'infeasible':>9}")
            _log(f"{name}: {res}")
            continue
        m = compute_metrics(res, instance)
        print(f"{name:<10}{res.station_count:>9}{res.f:>16.1f}{m.U:>9.4f}{m.P:>9.4f}")
    if not small:
        print(f"{'oracle':<10}{'n/a':>9}")
        _log(f"oracle skipped: limited to {MAX_TASKS} tasks and {MAX_STATIONS} stations")
    return EXIT_OK if not isinstance(results[0], Infeasible) else EXIT_INFEASIBLE


# parser --------------------------------------------------------------------

def _add_instance_args(p: argparse.ArgumentParser, out_required: bool) -> None:
    p.add_argument("--instance", required=True, help="instance directory")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="weight per used station")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA, help="weight per second of process time")
    p.add_argument("--ct", type=int, default=None, help="override the cycle time in seconds")
    p.add_argument("--method", choices=METHODS, default="regex", help="assembly extraction method")
    p.add_argument("--model", help="NB model file (for --method nb)")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    if out_required is not None:
        p.add_argument("--out", required=out_required, help="schedule JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dvcsched", description="Station planning for ECU commissioning on an assembly line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="locate ECU assembly and powered stations in assembly text")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--graph", required=True, help="assembly_graph.csv")
    p.add_argument("--topology", required=True, help="topology.csv")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    p.add_argument("--model", help="NB model file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train the naive Bayes row classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-rows", type=int, default=10, help="minimum rows per class")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="per-task accuracy of an extraction method on a labeled corpus")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--topology", help="take ECU names from here instead of the corpus labels")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    p.add_argument("--model", help="NB model; without it NB is cross-validated on the corpus")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--min-rows", type=int, default=10)
    p.set_defaults(func=cmd_eval)

    for name, func, helptext in (
        ("schedule", cmd_schedule, "greedy station assignment"),
        ("baseline", cmd_baseline, "single-bus manual-style plan"),
        ("oracle", cmd_oracle, "exhaustive optimum for small instances"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_instance_args(p, out_required=name != "schedule")
        p.set_defaults(func=func)

    p = sub.add_parser("graph", help="precedence graph of a schedule")
    p.add_argument("--schedule", required=True)
    p.add_argument("--format", choices=("dot", "json"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("synth", help="generate a synthetic instance or labeled corpus")
    p.add_argument("what", choices=("instance", "corpus"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--profile", choices=sorted(PROFILES), default="default")
    for flag in ("n-id", "n-flash", "n-conf", "n-calcom", "n-stations", "ct"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--assembly", type=int, default=250)
    p.add_argument("--powered", type=int, default=250)
    p.add_argument("--neither", type=int, default=500)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="greedy vs baseline (vs oracle when small)")
    _add_instance_args(p, out_required=None)
    p.set_defaults(func=cmd_compare)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        threads_from_env()
        return args.func(args)
    except UsageError as exc:
        _log(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except TooLarge as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except (Infeasible, InfeasibleSchedule, InfeasibleProfile, EmptySchedule) as exc:
        _log(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except (DataError, EmptyEcuList, InsufficientCorpus, UnknownEcu, UnknownStation) as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA
    except OSError as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA
    except DvcError as exc:
        _log(f"error: {exc}")
        return EXIT_INTERNAL
    except Exception:
        _log(traceback.format_exc())
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
