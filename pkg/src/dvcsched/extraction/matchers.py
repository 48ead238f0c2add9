"""Keyword-anchored ECU/power detection by fuzzy windows or exact regex."""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from ..errors import EmptyEcuList
from ..text import clean_text
from .distance import similarity
from .records import AssemblyRow, ExtractionResult, Label

INSTALL_KEYWORDS = ("install", "installed", "verbauen", "montieren", "kontaktieren", "contact", "contacted")
POWER_KEYWORDS = ("power", "powered", "bestromt", "bestromung", "strom")
DEFAULT_THRESHOLD = 90


class _KeywordMatcher:
    def __init__(
        self,
        ecu_names: Iterable[str],
        keywords: Sequence[str] = INSTALL_KEYWORDS,
        power_keywords: Sequence[str] = POWER_KEYWORDS,
    ):
        self.ecu_names = sorted({clean_text(n) for n in ecu_names if clean_text(n)})
        self.keywords = [clean_text(k) for k in keywords]
        self.power_keywords = [clean_text(k) for k in power_keywords]

    def _contains(self, text: str, pattern: str) -> bool:
        raise NotImplementedError

    def ecu_hits(self, text: str) -> list[str]:
        return [n for n in self.ecu_names if self._contains(text, n)]

    def has_install(self, text: str) -> bool:
        return any(self._contains(text, k) for k in self.keywords)

    def has_power(self, text: str) -> bool:
        return any(self._contains(text, k) for k in self.power_keywords)

    def label_row(self, text: str) -> Label:
        text = clean_text(text)
        if self.has_install(text) and self.ecu_hits(text):
            return Label.ECU_ASSEMBLY
        if self.has_power(text):
            return Label.POWERED_STATION
        return Label.NEITHER

    def extract(self, rows: Iterable[AssemblyRow]) -> ExtractionResult:
        result = ExtractionResult()
        for row in rows:
            text = clean_text(row.text)
            label = Label.NEITHER
            if self.has_install(text):
                hits = self.ecu_hits(text)
                for name in hits:
                    prev = result.ecu_stations.get(name)
                    if prev is None or row.station < prev:
                        result.ecu_stations[name] = row.station
                if hits:
                    label = Label.ECU_ASSEMBLY
            if self.has_power(text):
                result.powered_stations.add(row.station)
                if label is Label.NEITHER:
                    label = Label.POWERED_STATION
            result.per_row_decisions.append((row.line_no, label))
        return result


class FuzzyMatcher(_KeywordMatcher):
    """A pattern is present if some run of as many tokens as the pattern has
    reaches ``threshold`` percent similarity."""

    def __init__(self, ecu_names, keywords=INSTALL_KEYWORDS, power_keywords=POWER_KEYWORDS,
                 threshold: int = DEFAULT_THRESHOLD):
        if not 0 <= threshold <= 100:
            raise ValueError("threshold must lie in 0..100")
        super().__init__(ecu_names, keywords, power_keywords)
        self.threshold = threshold

    def _contains(self, text: str, pattern: str) -> bool:
        tokens = text.split()
        width = len(pattern.split())
        if len(tokens) <= width:
            windows = [" ".join(tokens)]
        else:
            windows = [" ".join(tokens[i:i + width]) for i in range(len(tokens) - width + 1)]
        plen = len(pattern)
        for w in windows:
            m = max(len(w), plen)
            # length gap alone is a lower bound on the edit distance
            if m and 200 * (m - abs(len(w) - plen)) + m < 2 * m * self.threshold:
                continue
            if similarity(w, pattern) >= self.threshold:
                return True
        return False


class RegexMatcher(_KeywordMatcher):
    """Exact whole-word containment on cleaned text."""

    def __init__(self, ecu_names, keywords=INSTALL_KEYWORDS, power_keywords=POWER_KEYWORDS):
        super().__init__(ecu_names, keywords, power_keywords)
        self._cache: dict[str, re.Pattern] = {}

    def _contains(self, text: str, pattern: str) -> bool:
        rx = self._cache.get(pattern)
        if rx is None:
            rx = self._cache[pattern] = re.compile(r"(?<!\w)" + re.escape(pattern) + r"(?!\w)")
        return rx.search(text) is not None


def fuzzy_extract(rows, ecu_names, keywords=INSTALL_KEYWORDS, threshold: int = DEFAULT_THRESHOLD,
                  power_keywords=POWER_KEYWORDS) -> ExtractionResult:
    if not list(ecu_names):
        raise EmptyEcuList("fuzzy extraction needs at least one ECU name")
    return FuzzyMatcher(ecu_names, keywords, power_keywords, threshold).extract(rows)


def regex_extract(rows, ecu_names, keywords=INSTALL_KEYWORDS, power_keywords=POWER_KEYWORDS) -> ExtractionResult:
    return RegexMatcher(ecu_names, keywords, power_keywords).extract(rows)
