"""CSV readers and writers for the planning sources.

Every reader takes raw bytes and returns a :class:`ParseResult`. In strict
mode the first bad row raises :class:`RowError`; otherwise bad rows are
collected in ``rejected`` so that ``parsed + rejected + duplicates`` always
equals the number of data rows.
"""

from __future__ import annotations

import csv
import enum
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .errors import EmptyFile, RowError, SchemaError
from .extraction.records import AssemblyRow, Label, LabeledRow
from .model import BusType, DiagnosticClass, Ecu, PowerLevel, ProcessType, Signal, Station, Task, Terminal
from .text import clean_text


class SourceKind(enum.Enum):
    TOPOLOGY = "topology"
    ASSEMBLY_GRAPH = "assembly_graph"
    COMMISSIONING = "commissioning"
    VEHICLE_ORDER = "order"
    STATIONS = "stations"
    CORPUS = "corpus"


HEADERS = {
    SourceKind.TOPOLOGY: ["name", "bus", "da", "dc", "terminal", "master", "cold_starter", "terminator", "hv"],
    SourceKind.ASSEMBLY_GRAPH: ["psl", "station", "short_text", "long_text"],
    SourceKind.COMMISSIONING: ["ecu", "duration_s", "planned_station", "process"],
    SourceKind.VEHICLE_ORDER: ["product_key", "code", "description"],
    SourceKind.STATIONS: ["index", "power", "hv", "signals"],
    SourceKind.CORPUS: ["text", "label", "station", "ecu_name"],
}
COMMISSIONING_OPTIONAL = ["needs_v", "needs_p", "needs_vpe", "needs_hv", "sub_ops"]


@dataclass(frozen=True)
class RawRow:
    source: SourceKind
    line_no: int
    fields: tuple


@dataclass(frozen=True)
class VehicleOrder:
    product_key: str
    configuration_codes: tuple = ()


@dataclass
class ParseResult:
    items: Any
    rejected: list[RowError] = field(default_factory=list)
    duplicates: int = 0
    input_rows: int = 0


_TRUE = {"true", "1", "yes", "y", "x"}
_FALSE = {"false", "0", "no", "n", ""}


def _bool(text: str) -> bool:
    key = text.strip().lower()
    if key in _TRUE:
        return True
    if key in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str, what: str) -> int:
    t = text.strip().lower()
    if t.endswith("s") and what == "duration":
        t = t[:-1]
    try:
        return int(t)
    except ValueError:
        raise ValueError(f"{what} is not an integer: {text!r}") from None


def _da(text: str) -> int:
    t = text.strip().lower()
    if t.startswith("0x"):
        t = t[2:]
    try:
        value = int(t, 16)
    except ValueError:
        raise ValueError(f"diagnostic address is not hex: {text!r}") from None
    if not 0 <= value <= 0xFF:
        raise ValueError(f"diagnostic address out of range 0x00..0xFF: {text!r}")
    return value


def _dc(text: str) -> DiagnosticClass:
    t = text.strip().lower().replace("dc_", "").replace("dc", "")
    try:
        value = int(t)
    except ValueError:
        raise ValueError(f"DC is not an integer: {text!r}") from None
    if not 0 <= value <= 4:
        raise ValueError("DC out of range 0..4")
    return DiagnosticClass(value)


def _terminal(text: str) -> Terminal:
    t = text.strip().lower().replace("kl", "").replace("t", "")
    for term in Terminal:
        if term.value == t:
            return term
    raise ValueError(f"terminal must be 15 or 30: {text!r}")


def _power(text: str) -> PowerLevel:
    try:
        return PowerLevel(text.strip().lower())
    except ValueError:
        raise ValueError(f"power must be none|ignition|external: {text!r}") from None


def _signals(text: str) -> frozenset:
    out = set()
    for part in text.replace(",", ";").split(";"):
        part = part.strip().lower()
        if part:
            try:
                out.add(Signal(part))
            except ValueError:
                raise ValueError(f"unknown signal {part!r}") from None
    return frozenset(out)


def _read_rows(kind: SourceKind, content: bytes) -> tuple[list[str], list[RawRow]]:
    try:
        text = content.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise SchemaError(f"{kind.value}: not UTF-8 ({exc})") from None
    if not text.strip():
        raise EmptyFile(f"{kind.value}: empty file")
    reader = csv.reader(io.StringIO(text))
    header = [h.strip().lower() for h in next(reader)]
    rows = []
    for fields in reader:
        if not any(f.strip() for f in fields):
            continue
        rows.append(RawRow(kind, reader.line_num, tuple(fields)))
    if not rows:
        raise EmptyFile(f"{kind.value}: no data rows")
    return header, rows


def _check_header(kind: SourceKind, header: list[str]) -> dict[str, int]:
    required = HEADERS[kind]
    missing = [h for h in required if h not in header]
    if missing:
        raise SchemaError(f"{kind.value}: missing column(s) {', '.join(missing)}; got {','.join(header)}")
    if header[: len(required)] != required:
        raise SchemaError(f"{kind.value}: columns must start with {','.join(required)}")
    return {h: i for i, h in enumerate(header)}


def _parse(kind: SourceKind, content: bytes, convert: Callable, strict: bool) -> ParseResult:
    header, rows = _read_rows(kind, content)
    cols = _check_header(kind, header)
    seen: set = set()
    result = ParseResult(items=[], input_rows=len(rows))
    for raw in rows:
        key = tuple(clean_text(f) for f in raw.fields)
        if key in seen:
            result.duplicates += 1
            continue
        seen.add(key)
        get = _getter(raw, cols)
        try:
            result.items.append(convert(raw, get))
        except (ValueError, KeyError) as exc:
            err = RowError(raw.line_no, str(exc).strip("'\""), kind.value)
            if strict:
                raise err from None
            result.rejected.append(err)
    return result


def _getter(raw: RawRow, cols: dict[str, int]) -> Callable[[str], str]:
    def get(name: str, default: Optional[str] = None) -> str:
        i = cols.get(name)
        if i is None or i >= len(raw.fields):
            if default is not None:
                return default
            raise ValueError(f"missing field {name}")
        return raw.fields[i]

    return get


@dataclass(frozen=True)
class _TopoRow:
    line_no: int
    name: str
    bus: BusType
    da: int
    dc: DiagnosticClass
    terminal: Terminal
    master: str
    cold: bool
    term: bool
    hv: bool


def _topology_row(raw: RawRow, get) -> _TopoRow:
    name = clean_text(get("name"))
    if not name:
        raise ValueError("ECU name is empty")
    return _TopoRow(
        raw.line_no,
        name,
        BusType.parse(get("bus")),
        _da(get("da")),
        _dc(get("dc")),
        _terminal(get("terminal")),
        clean_text(get("master")),
        _bool(get("cold_starter")),
        _bool(get("terminator")),
        _bool(get("hv")),
    )


def ecu_id_for(name: str, bus: BusType, shared: bool) -> str:
    """Ids are the cleaned name, suffixed with the bus for multi-bus ECUs."""
    return f"{name}@{bus.value.lower()}" if shared else name


def _build_topology(rows: list[_TopoRow]) -> list[Ecu]:
    names = Counter(r.name for r in rows)
    ids = {(r.name, r.bus): ecu_id_for(r.name, r.bus, names[r.name] > 1) for r in rows}
    out = []
    for r in rows:
        master_id = None
        if r.master:
            # prefer the master entry on the slave's own bus
            master_id = ids.get((r.master, r.bus))
            if master_id is None:
                same_name = sorted(i for (n, _), i in ids.items() if n == r.master)
                master_id = same_name[0] if same_name else r.master
        out.append(Ecu(ids[(r.name, r.bus)], r.name, r.bus, r.da, r.dc, r.terminal, master_id,
                       r.cold, r.term, r.hv))
    return out


def _commissioning_row(raw: RawRow, get) -> Task:
    ecu = clean_text(get("ecu"))
    if not ecu:
        raise ValueError("ECU reference is empty")
    duration = _int(get("duration_s"), "duration")
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    planned = get("planned_station").strip()
    sub_ops = _int(get("sub_ops", "1") or "1", "sub_ops")
    process = ProcessType.parse(get("process"))
    if sub_ops < 1 or (sub_ops > 1 and process is not ProcessType.CALCOM):
        raise ValueError("sub_ops must be 1 except for calcom")
    return Task(
        ecu_id=ecu,
        process=process,
        duration_s=duration,
        needs_v=_bool(get("needs_v", "")),
        needs_p=_bool(get("needs_p", "")),
        needs_vpe=_bool(get("needs_vpe", "")),
        needs_hv=_bool(get("needs_hv", "")),
        sub_op_count=sub_ops,
        planned_station=_int(planned, "planned station") if planned else None,
    )


def _assembly_row(raw: RawRow, get) -> AssemblyRow:
    short, long = clean_text(get("short_text")), clean_text(get("long_text"))
    return AssemblyRow(
        line_no=raw.line_no,
        station=_int(get("station"), "station"),
        text=" ".join(t for t in (short, long) if t),
        psl=clean_text(get("psl")),
    )


def _station_row(raw: RawRow, get) -> Station:
    index = _int(get("index"), "index")
    if index < 1:
        raise ValueError("station index must be positive")
    return Station(index, _power(get("power")), _bool(get("hv")), _signals(get("signals")))


def _order_row(raw: RawRow, get) -> tuple[int, str, str, str]:
    key = clean_text(get("product_key"))
    code = get("code").strip().upper()
    if not code:
        raise ValueError("configuration code is empty")
    return raw.line_no, key, code, clean_text(get("description"))


def _corpus_row(raw: RawRow, get) -> LabeledRow:
    name = clean_text(get("ecu_name"))
    return LabeledRow(clean_text(get("text")), Label.parse(get("label")), _int(get("station"), "station"),
                      name or None)


def parse_source(kind: SourceKind, content: bytes, strict: bool = True) -> ParseResult:
    """Parse one CSV source into domain objects.

    ``items`` holds a list of :class:`Ecu`, :class:`AssemblyRow`,
    :class:`Task`, :class:`Station` or :class:`LabeledRow`, or a single
    :class:`VehicleOrder` for order files.
    """
    if kind is SourceKind.TOPOLOGY:
        res = _parse(kind, content, _topology_row, strict)
        res.items = _build_topology(res.items)
        return res
    if kind is SourceKind.VEHICLE_ORDER:
        res = _parse(kind, content, _order_row, strict)
        res.items = _build_order(res, strict)
        return res
    convert = {
        SourceKind.ASSEMBLY_GRAPH: _assembly_row,
        SourceKind.COMMISSIONING: _commissioning_row,
        SourceKind.STATIONS: _station_row,
        SourceKind.CORPUS: _corpus_row,
    }[kind]
    return _parse(kind, content, convert, strict)


def _build_order(res: ParseResult, strict: bool) -> VehicleOrder:
    codes: dict[str, str] = {}
    product_key = res.items[0][1] if res.items else ""
    kept = []
    for line_no, key, code, desc in res.items:
        problem = None
        if key != product_key:
            problem = f"product key {key!r} differs from {product_key!r}"
        elif code in codes:
            problem = f"configuration code {code} repeated"
        if problem:
            err = RowError(line_no, problem, SourceKind.VEHICLE_ORDER.value)
            if strict:
                raise err
            res.rejected.append(err)
            continue
        codes[code] = desc
        kept.append((code, desc))
    return VehicleOrder(product_key, tuple(kept))


# writers ------------------------------------------------------------------

def _write(header: list[str], rows: list[list]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _flag(b: bool) -> str:
    return "true" if b else "false"


def write_source(kind: SourceKind, items) -> bytes:
    """Inverse of :func:`parse_source` for well-formed items."""
    if kind is SourceKind.TOPOLOGY:
        by_id = {e.id: e for e in items}
        rows = [[e.name, e.bus.value, f"0x{e.diagnostic_address:02x}", int(e.dc), e.terminal.value,
                 by_id[e.master_id].name if e.master_id in by_id else (e.master_id or ""),
                 _flag(e.is_cold_starter), _flag(e.is_terminator), _flag(e.hv_required)] for e in items]
        return _write(HEADERS[kind], rows)
    if kind is SourceKind.COMMISSIONING:
        rows = [[t.ecu_id, t.duration_s, "" if t.planned_station is None else t.planned_station, t.process.slug,
                 _flag(t.needs_v), _flag(t.needs_p), _flag(t.needs_vpe), _flag(t.needs_hv), t.sub_op_count]
                for t in items]
        return _write(HEADERS[kind] + COMMISSIONING_OPTIONAL, rows)
    if kind is SourceKind.ASSEMBLY_GRAPH:
        return _write(HEADERS[kind], [[r.psl, r.station, r.text, ""] for r in items])
    if kind is SourceKind.STATIONS:
        rows = [[s.index, s.power.value, _flag(s.hv_capable),
                 ";".join(sig.value for sig in Signal if sig in s.signal_caps)] for s in items]
        return _write(HEADERS[kind], rows)
    if kind is SourceKind.VEHICLE_ORDER:
        return _write(HEADERS[kind], [[items.product_key, c, d] for c, d in items.configuration_codes])
    if kind is SourceKind.CORPUS:
        return _write(HEADERS[kind], [[r.text, r.label.value, r.station, r.ecu_name or ""] for r in items])
    raise ValueError(kind)
