"""Seeded synthetic instances and labeled corpora at production-like scale.

Everything is drawn from :class:`~dvcsched.rng.SplitMix64`, so a seed and a
profile fully determine the output.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass

from .errors import Infeasible, InfeasibleProfile, InvalidInstance
from .extraction.matchers import INSTALL_KEYWORDS, POWER_KEYWORDS
from .extraction.records import Label, LabeledRow
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
from .rng import SplitMix64

MAX_ATTEMPTS = 100
ALL_BUSES = tuple(BusType)
# infrastructure each bus needs before any ECU on it can communicate
MIN_PER_BUS = {BusType.CAN: 2, BusType.FLEXRAY: 2, BusType.LIN: 1, BusType.MOST: 1, BusType.LVDS: 1}


@dataclass(frozen=True)
class Profile:
    n_id: int = 80
    n_flash: int = 4
    n_conf: int = 51
    n_calcom: int = 38
    n_stations: int = 100
    ct_s: int = 88
    buses: tuple = ALL_BUSES
    # ECUs are assembled within this leading fraction of the line
    assembly_span: float = 0.6
    # station power draw weights: none, ignition, external
    power_mix: tuple = (0.15, 0.2, 0.65)
    # keep only draws where the single-bus manual plan also fits on the line
    require_baseline: bool = True

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["buses"] = [b.value for b in self.buses]
        doc["power_mix"] = list(self.power_mix)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Profile":
        doc = dict(doc)
        if "buses" in doc:
            doc["buses"] = tuple(BusType.parse(b) for b in doc["buses"])
        if "power_mix" in doc:
            doc["power_mix"] = tuple(doc["power_mix"])
        return cls(**doc)


DEFAULT_PROFILE = Profile()
# at most 12 tasks on 8 stations, within reach of the exhaustive oracle; a short
# segment where only dedicated diagnostic bays (about one in five) carry power
SMALL_PROFILE = Profile(n_id=5, n_flash=1, n_conf=3, n_calcom=3, n_stations=8, ct_s=88,
                        buses=(BusType.CAN, BusType.FLEXRAY, BusType.LIN),
                        power_mix=(0.8, 0.0, 0.2), require_baseline=False)
FIXTURE_PROFILE = Profile(n_id=6, n_flash=1, n_conf=3, n_calcom=2, n_stations=8, ct_s=88,
                          buses=(BusType.CAN, BusType.LIN), require_baseline=False)

ECU_NAME_POOL = (
    "bcm", "ecm", "tcm", "esp", "eps", "abs", "acm", "bms", "obc", "dcdc", "inverter", "hvac",
    "seat_fl", "seat_fr", "door_fl", "door_fr", "door_rl", "door_rr", "tailgate", "sunroof",
    "tpms", "kessy", "park_assist", "acc_radar", "front_camera", "rear_camera", "night_vision",
    "hud", "cluster", "head_unit", "amplifier", "telematics", "light_left", "light_right",
    "rear_light", "wiper", "steering_column", "chassis", "suspension", "trailer", "charging",
    "airbag", "mirror_left", "mirror_right", "climate_rear", "ambient_light",
)


def _check_profile(profile: Profile) -> None:
    counts = (profile.n_id, profile.n_flash, profile.n_conf, profile.n_calcom, profile.ct_s)
    if min(counts) <= 0:
        raise InfeasibleProfile("all counts and the cycle time must be positive")
    if profile.n_stations < 5:
        raise InfeasibleProfile("need at least 5 stations")
    if not 0 < profile.assembly_span <= 1:
        raise InfeasibleProfile("assembly_span must lie in (0, 1]")
    if len(profile.power_mix) != 3 or min(profile.power_mix) < 0 or sum(profile.power_mix) <= 0:
        raise InfeasibleProfile("power_mix needs three nonnegative weights")
    if max(profile.n_flash, profile.n_conf, profile.n_calcom) > profile.n_id:
        raise InfeasibleProfile("process counts cannot exceed the number of ECUs")
    if not profile.buses:
        raise InfeasibleProfile("need at least one bus")
    need = sum(MIN_PER_BUS[b] for b in profile.buses)
    if profile.n_id < need:
        raise InfeasibleProfile(f"{need} ECUs needed for bus infrastructure, profile has {profile.n_id}")


def gen_instance(seed: int, profile: Profile = DEFAULT_PROFILE) -> Instance:
    """Draw an instance and keep it only if the greedy scheduler places every
    task (and, when the profile asks for it, the single-bus baseline too).

    Retries with the continuing random stream; gives up after
    ``MAX_ATTEMPTS`` draws.
    """
    from .scheduler import baseline_sequential, schedule

    _check_profile(profile)
    rng = SplitMix64(seed)
    for _ in range(MAX_ATTEMPTS):
        inst = _draw_instance(rng, seed, profile)
        try:
            schedule(inst)
            if profile.require_baseline:
                baseline_sequential(inst)
        except (Infeasible, InvalidInstance):
            continue
        return inst
    raise InfeasibleProfile(f"no feasible instance for seed {seed} after {MAX_ATTEMPTS} attempts")


def _weighted(rng: SplitMix64, options: list[tuple[object, float]]):
    r = rng.random() * sum(w for _, w in options)
    for value, w in options:
        r -= w
        if r < 0:
            return value
    return options[-1][0]


@dataclass
class _Draft:
    name: str
    bus: BusType
    dc: DiagnosticClass
    master: bool = False
    cold: bool = False
    term: bool = False
    has_tasks: bool = True
    twin_of: object = None


def _draw_instance(rng: SplitMix64, seed: int, profile: Profile) -> Instance:
    buses = sorted(set(profile.buses))
    bus_of = [b for b in buses for _ in range(MIN_PER_BUS[b])]
    bus_of += [rng.choice(buses) for _ in range(profile.n_id - len(bus_of))]
    per_bus: dict[BusType, int] = Counter(bus_of)

    names = list(ECU_NAME_POOL)
    rng.shuffle(names)
    name_iter = iter(names)
    used_names: Counter = Counter()

    def fresh_name() -> str:
        try:
            base = next(name_iter)
        except StopIteration:
            base = rng.choice(ECU_NAME_POOL)
        used_names[base] += 1
        return base if used_names[base] == 1 else f"{base}_{used_names[base]}"

    infra: list[_Draft] = []
    others: list[_Draft] = []
    gateway = None
    for bus in buses:
        n = per_bus[bus]
        if bus in (BusType.CAN, BusType.FLEXRAY):
            # the FlexRay master is the same physical gateway as the CAN master
            twin = gateway if bus is BusType.FLEXRAY else None
            name = "gateway" if bus is BusType.CAN or twin is not None else fresh_name()
            master = _Draft(name, bus, DiagnosticClass.DC4, master=True, term=True,
                            cold=bus is BusType.FLEXRAY, twin_of=twin)
            if bus is BusType.CAN:
                gateway = master
            second = _Draft(fresh_name(), bus, DiagnosticClass.DC3, term=True, cold=bus is BusType.FLEXRAY)
            infra += [master, second]
            start = 2
        else:
            infra.append(_Draft(fresh_name(), bus, DiagnosticClass.DC4, master=True))
            start = 1
        for _ in range(start, n):
            if bus is BusType.LIN:
                dc = _weighted(rng, [(DiagnosticClass.DC1, 0.6), (DiagnosticClass.DC2, 0.4)])
            else:
                dc = _weighted(rng, [(DiagnosticClass.DC1, 0.3), (DiagnosticClass.DC2, 0.3), (DiagnosticClass.DC3, 0.4)])
            others.append(_Draft(fresh_name(), bus, dc))
    for _ in range(profile.n_id // 10):
        others.append(_Draft(fresh_name(), rng.choice(buses), DiagnosticClass.DC0, has_tasks=False))
    rng.shuffle(others)
    roster = infra + others

    # assembly: ascending over the leading part of the line, infrastructure first
    asm_end = max(1, int(profile.n_stations * profile.assembly_span))
    draws = sorted(rng.randint(1, asm_end) for _ in roster)
    assembly_of = {}
    for d, s in zip(roster, draws):
        assembly_of[id(d)] = assembly_of[id(d.twin_of)] if d.twin_of is not None else s

    masters = {d.bus: d for d in roster if d.master}
    shared = Counter(d.name for d in roster)

    def ecu_id(d: _Draft) -> str:
        return f"{d.name}@{d.bus.value.lower()}" if shared[d.name] > 1 else d.name

    das = rng.sample(range(0x10, 0xF0), len(roster))
    ecus = []
    assembly = {}
    for d, da in zip(roster, das):
        slave = d.dc <= DiagnosticClass.DC2
        terminal = Terminal.T30 if d.master or rng.chance(0.2) else Terminal.T15
        hv = d.bus is not BusType.LIN and d.has_tasks and rng.chance(0.1)
        ecu = Ecu(
            id=ecu_id(d),
            name=d.name,
            bus=d.bus,
            diagnostic_address=da,
            dc=d.dc,
            terminal=terminal,
            master_id=ecu_id(masters[d.bus]) if slave else None,
            is_cold_starter=d.cold,
            is_terminator=d.term,
            hv_required=hv,
        )
        ecus.append(ecu)
        assembly[ecu.id] = assembly_of[id(d)]

    stations = []
    for i in range(1, profile.n_stations + 1):
        if i > profile.n_stations - 2:
            # end-of-line bays provide every capability
            stations.append(Station(i, PowerLevel.EXTERNAL, True, frozenset(Signal)))
            continue
        power = _weighted(rng, list(zip(PowerLevel, profile.power_mix)))
        hv = rng.chance(0.3)
        caps = frozenset(s for s in Signal if rng.chance(0.35))
        stations.append(Station(i, power, hv, caps))

    tasks = _draw_tasks(rng, ecus, profile)
    return Instance(
        topology=ecus,
        stations=stations,
        assembly=assembly,
        tasks=tasks,
        derivative=f"synth-{seed}",
        ct_s=profile.ct_s,
    )


def _pick(rng: SplitMix64, preferred: list[Ecu], rest: list[Ecu], k: int) -> list[Ecu]:
    if k <= len(preferred):
        return rng.sample(preferred, k)
    return preferred + rng.sample(rest, k - len(preferred))


def _draw_tasks(rng: SplitMix64, ecus: list[Ecu], profile: Profile) -> list[Task]:
    active = [e for e in ecus if e.dc > DiagnosticClass.DC0]
    masters = [e for e in active if e.dc == DiagnosticClass.DC4]
    non_masters = [e for e in active if e.dc != DiagnosticClass.DC4]
    flashable = [e for e in active if e.dc >= DiagnosticClass.DC2]
    if len(flashable) < profile.n_flash:
        raise InfeasibleProfile(f"only {len(flashable)} flashable ECUs for {profile.n_flash} flash tasks")

    flash = {e.id for e in rng.sample(flashable, profile.n_flash)}
    conf = {e.id for e in _pick(rng, masters, non_masters, profile.n_conf)}
    calcom = {e.id for e in _pick(rng, masters, non_masters, profile.n_calcom)}

    tasks = []
    for e in active:
        tasks.append(Task(e.id, ProcessType.ID_CHECK, rng.randint(5, 20)))
        if e.id in flash:
            tasks.append(Task(e.id, ProcessType.FLASH, rng.randint(30, 60)))
        if e.id in conf:
            tasks.append(Task(e.id, ProcessType.CONFIGURATION, rng.randint(5, 30),
                              needs_v=rng.chance(0.1), needs_hv=e.hv_required))
        if e.id in calcom:
            sub_ops = rng.randint(1, 4)
            duration = sum(rng.randint(5, 12) for _ in range(sub_ops))
            tasks.append(Task(e.id, ProcessType.CALCOM, duration,
                              needs_v=rng.chance(0.25), needs_p=rng.chance(0.3), needs_vpe=rng.chance(0.15),
                              needs_hv=e.hv_required, sub_op_count=sub_ops))
    return tasks


# corpus -------------------------------------------------------------------

CORPUS_ECU_NAMES = (
    "central gateway", "body control module", "engine control unit", "transmission control unit",
    "battery management system", "electric power steering", "airbag control unit", "instrument cluster",
    "head unit", "rear view camera", "park assist module", "adaptive cruise radar",
    "door control unit front left", "door control unit rear right", "seat control module",
    "climate control unit", "tire pressure monitor", "trailer hitch module", "sunroof control module",
    "keyless entry module", "light control module", "chassis control unit", "night vision camera",
    "head up display", "onboard charger", "inverter control unit", "rear light module",
    "matrix headlight left", "amplifier", "telematics unit",
)

_ASSEMBLY_TEMPLATES = (
    "{ecu} {kw}",
    "{kw} {ecu}",
    "{ecu} am halter {kw} und verschrauben",
    "{ecu} {kw} stecker pruefen",
    "please {kw} {ecu} on bracket",
    "{ecu} im modultraeger {kw}",
    "{kw} {ecu} and secure connector",
    "{ecu} gemaess zeichnung {kw}",
)
_POWER_TEMPLATES = (
    "fahrzeug {kw} anschliessen",
    "externe {kw} an fahrzeug anlegen",
    "vehicle {kw} supply connect",
    "ladegeraet fuer {kw} anklemmen",
    "{kw} ueber starthilfepunkt herstellen",
    "connect external {kw} unit",
)
_NEITHER_TEMPLATES = (
    "tuerverkleidung {kw}",
    "sitzanlage {kw} und ausrichten",
    "install wheel covers",
    "windschutzscheibe kleben",
    "radmuttern mit drehmoment anziehen",
    "kabelbaum zum {ecu} verlegen",
    "{ecu} kabel sichtpruefung",
    "teppich einlegen und fixieren",
    "bremsfluessigkeit befuellen",
    "stossfaenger {kw}",
    "dachhimmel einsetzen",
    "scheinwerfer einstellen",
)
TYPO_RATE = 0.10


def _typo(rng: SplitMix64, word: str) -> str:
    """One random single-character edit."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    i = rng.randint(0, len(word) - 1)
    kind = rng.randint(0, 3)
    if kind == 0 and len(word) > 1:
        return word[:i] + word[i + 1:]
    if kind == 1:
        return word[:i] + rng.choice(letters) + word[i:]
    if kind == 2 and i + 1 < len(word):
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    return word[:i] + rng.choice(letters) + word[i + 1:]


def _perturb(rng: SplitMix64, text: str, rate: float) -> str:
    return " ".join(_typo(rng, w) if rng.chance(rate) else w for w in text.split())


def gen_corpus(seed: int, counts: dict | tuple = (250, 250, 500), typo_rate: float = TYPO_RATE) -> list[LabeledRow]:
    """Template sentences with exact class counts, shuffled, each word
    misspelled with probability ``typo_rate``.

    ``counts`` is ``(assembly, powered, neither)`` or a dict with those keys.
    """
    if isinstance(counts, dict):
        counts = (counts["assembly"], counts["powered"], counts["neither"])
    if min(counts) <= 0:
        raise ValueError("class counts must be positive")
    rng = SplitMix64(seed)
    rows: list[LabeledRow] = []
    for _ in range(counts[0]):
        ecu = rng.choice(CORPUS_ECU_NAMES)
        text = rng.choice(_ASSEMBLY_TEMPLATES).format(ecu=ecu, kw=rng.choice(INSTALL_KEYWORDS))
        rows.append(LabeledRow(_perturb(rng, text, typo_rate), Label.ECU_ASSEMBLY, rng.randint(1, 60), ecu))
    for _ in range(counts[1]):
        text = rng.choice(_POWER_TEMPLATES).format(kw=rng.choice(POWER_KEYWORDS))
        rows.append(LabeledRow(_perturb(rng, text, typo_rate), Label.POWERED_STATION, rng.randint(1, 60)))
    for _ in range(counts[2]):
        text = rng.choice(_NEITHER_TEMPLATES).format(ecu=rng.choice(CORPUS_ECU_NAMES),
                                                     kw=rng.choice(INSTALL_KEYWORDS))
        rows.append(LabeledRow(_perturb(rng, text, typo_rate), Label.NEITHER, rng.randint(1, 60)))
    rng.shuffle(rows)
    return rows
