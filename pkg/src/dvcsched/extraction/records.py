"""Row and result types shared by the extractors."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class Label(enum.Enum):
    ECU_ASSEMBLY = "ecu_assembly"
    POWERED_STATION = "powered_station"
    NEITHER = "neither"

    @classmethod
    def parse(cls, text: str) -> "Label":
        return cls(text.strip().lower())


@dataclass(frozen=True)
class AssemblyRow:
    """One cleaned line of the assembly precedence graph."""

    line_no: int
    station: int
    text: str
    psl: str = ""


@dataclass(frozen=True)
class LabeledRow:
    text: str
    label: Label
    station: int
    ecu_name: Optional[str] = None

    def __post_init__(self) -> None:
        if self.label is Label.ECU_ASSEMBLY and not self.ecu_name:
            raise ValueError("ecu_assembly rows need an ecu_name")


@dataclass
class ExtractionResult:
    ecu_stations: dict[str, int] = field(default_factory=dict)
    powered_stations: set = field(default_factory=set)
    per_row_decisions: list[tuple[int, Label]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ecu_stations": dict(sorted(self.ecu_stations.items())),
            "powered_stations": sorted(self.powered_stations),
            "per_row_decisions": [[n, lab.value] for n, lab in self.per_row_decisions],
        }
