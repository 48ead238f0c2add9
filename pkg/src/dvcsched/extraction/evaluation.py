"""Per-task accuracy of row labelers, as in a two-row results table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .naive_bayes import NbExtractor, train_nb
from .records import Label, LabeledRow


class Extractor(Protocol):
    def label_row(self, text: str) -> Label: ...


@dataclass(frozen=True)
class TaskAccuracy:
    ecu_assembly: float
    powered_stations: float


def accuracy_from_labels(corpus: Sequence[LabeledRow], predicted: Sequence[Label]) -> TaskAccuracy:
    """Each task is a binary decision per row: is it (not) this class."""
    if not corpus:
        raise ValueError("corpus is empty")
    if len(predicted) != len(corpus):
        raise ValueError("one prediction per row required")
    n = len(corpus)
    asm = sum((r.label is Label.ECU_ASSEMBLY) == (p is Label.ECU_ASSEMBLY) for r, p in zip(corpus, predicted))
    pwr = sum((r.label is Label.POWERED_STATION) == (p is Label.POWERED_STATION) for r, p in zip(corpus, predicted))
    return TaskAccuracy(asm / n, pwr / n)


def evaluate_extractor(extractor: Extractor, corpus: Sequence[LabeledRow]) -> TaskAccuracy:
    return accuracy_from_labels(corpus, [extractor.label_row(r.text) for r in corpus])


def cross_validated_labels(corpus: Sequence[LabeledRow], folds: int = 5, min_rows_per_class: int = 10) -> list[Label]:
    """Out-of-fold NB predictions; row ``i`` belongs to fold ``i % folds``."""
    out: list = [None] * len(corpus)
    for k in range(folds):
        train = [r for i, r in enumerate(corpus) if i % folds != k]
        model = NbExtractor(train_nb(train, min_rows_per_class))
        for i, r in enumerate(corpus):
            if i % folds == k:
                out[i] = model.label_row(r.text)
    return out
