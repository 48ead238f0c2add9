"""Instance directories: the planning CSVs plus an optional manifest.

Layout::

    topology.csv  stations.csv  assembly_graph.csv  commissioning.csv
    order.csv (optional)  manifest.json (optional: ct_s, seed, profile, hashes)

Assembly stations are not stored directly; they are recovered from the
assembly graph text by one of the extraction methods.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

from .errors import DataError, MissingSource
from .extraction import FuzzyMatcher, NbExtractor, NbModel, RegexMatcher
from .extraction.matchers import DEFAULT_THRESHOLD
from .extraction.records import AssemblyRow, ExtractionResult
from .ingestion import SourceKind, VehicleOrder, parse_source, write_source
from .model import Instance, PowerLevel
from .scheduler import DEFAULT_CT_S

FILES = {
    SourceKind.TOPOLOGY: "topology.csv",
    SourceKind.STATIONS: "stations.csv",
    SourceKind.ASSEMBLY_GRAPH: "assembly_graph.csv",
    SourceKind.COMMISSIONING: "commissioning.csv",
    SourceKind.VEHICLE_ORDER: "order.csv",
}
REQUIRED = (SourceKind.TOPOLOGY, SourceKind.STATIONS, SourceKind.ASSEMBLY_GRAPH, SourceKind.COMMISSIONING)
MANIFEST = "manifest.json"
METHODS = ("regex", "fuzzy", "nb")

_ASSEMBLY_TEXT = ("{} verbauen", "{} montieren", "install {}", "{} kontaktieren")
_POWER_TEXT = "fahrzeug extern bestromt"
_FILLER_TEXT = ("kabelbaum verlegen", "teppich einlegen", "radmuttern anziehen", "scheiben kleben")


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise MissingSource(f"missing {path.name} in {path.parent}") from None


def read_manifest(directory: Path | str) -> dict:
    path = Path(directory) / MANIFEST
    if not path.exists():
        return {}
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{MANIFEST}: {exc}") from exc


def extract_assembly(
    rows: list[AssemblyRow],
    ecu_names,
    method: str = "regex",
    model: Optional[NbModel] = None,
    threshold: int = DEFAULT_THRESHOLD,
) -> ExtractionResult:
    if method == "regex":
        return RegexMatcher(ecu_names).extract(rows)
    if method == "fuzzy":
        return FuzzyMatcher(ecu_names, threshold=threshold).extract(rows)
    if method == "nb":
        if model is None:
            raise ValueError("the nb method needs a trained model")
        return NbExtractor(model, ecu_names, threshold).extract(rows)
    raise ValueError(f"unknown extraction method {method!r}")


def load_instance(
    directory: Path | str,
    method: str = "regex",
    model: Optional[NbModel] = None,
    threshold: int = DEFAULT_THRESHOLD,
) -> Instance:
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingSource(f"instance directory {directory} not found")
    parsed = {kind: parse_source(kind, _read(directory / FILES[kind])).items for kind in REQUIRED}
    order_path = directory / FILES[SourceKind.VEHICLE_ORDER]
    order = parse_source(SourceKind.VEHICLE_ORDER, order_path.read_bytes()).items if order_path.exists() else None
    manifest = read_manifest(directory)

    topology = parsed[SourceKind.TOPOLOGY]
    names = sorted({e.name for e in topology})
    found = extract_assembly(parsed[SourceKind.ASSEMBLY_GRAPH], names, method, model, threshold)
    assembly = {e.id: found.ecu_stations[e.name] for e in topology if e.name in found.ecu_stations}

    derivative = manifest.get("derivative") or (order.product_key if order else directory.name)
    return Instance(
        topology=topology,
        stations=parsed[SourceKind.STATIONS],
        assembly=assembly,
        tasks=parsed[SourceKind.COMMISSIONING],
        derivative=derivative,
        ct_s=int(manifest.get("ct_s", DEFAULT_CT_S)),
    )


def assembly_rows(instance: Instance) -> list[AssemblyRow]:
    """Deterministic assembly-graph text that regex extraction maps back to
    ``instance.assembly`` exactly."""
    first_station: dict[str, int] = {}
    for ecu in instance.topology:
        st = instance.assembly.get(ecu.id)
        if st is not None:
            first_station[ecu.name] = min(st, first_station.get(ecu.name, st))
    by_station: dict[int, list[str]] = {}
    for name, st in first_station.items():
        by_station.setdefault(st, []).append(name)

    rows = []
    psl = instance.derivative
    for st in instance.station_indices:
        texts = [_FILLER_TEXT[st % len(_FILLER_TEXT)]]
        for i, name in enumerate(sorted(by_station.get(st, ()))):
            texts.append(_ASSEMBLY_TEXT[(st + i) % len(_ASSEMBLY_TEXT)].format(name))
        if instance.station_map[st].power is PowerLevel.EXTERNAL:
            texts.append(_POWER_TEXT)
        base = len(rows) + 2  # line 1 is the header
        rows.extend(AssemblyRow(base + i, st, t, psl) for i, t in enumerate(texts))
    return rows


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_instance_dir(
    instance: Instance,
    directory: Path | str,
    seed: Optional[int] = None,
    profile: Optional[dict] = None,
) -> dict:
    """Write the CSV sources and ``manifest.json``; returns the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payloads = {
        SourceKind.TOPOLOGY: write_source(SourceKind.TOPOLOGY, instance.topology),
        SourceKind.STATIONS: write_source(SourceKind.STATIONS, instance.stations),
        SourceKind.ASSEMBLY_GRAPH: write_source(SourceKind.ASSEMBLY_GRAPH, assembly_rows(instance)),
        SourceKind.COMMISSIONING: write_source(SourceKind.COMMISSIONING, instance.tasks),
        SourceKind.VEHICLE_ORDER: write_source(
            SourceKind.VEHICLE_ORDER, VehicleOrder(instance.derivative, (("BASE", "base equipment"),))
        ),
    }
    hashes = {}
    for kind, data in payloads.items():
        (directory / FILES[kind]).write_bytes(data)
        hashes[FILES[kind]] = _sha256(data)
    manifest = {
        "version": "inst-v1",
        "derivative": instance.derivative,
        "ct_s": instance.ct_s,
        "seed": seed,
        "profile": profile,
        "sha256": hashes,
    }
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
