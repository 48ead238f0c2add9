"""Recover ECU assembly stations and powered stations from assembly text."""

from .distance import levenshtein_distance, similarity
from .evaluation import (
    TaskAccuracy,
    accuracy_from_labels,
    cross_validated_labels,
    evaluate_extractor,
)
from .matchers import (
    DEFAULT_THRESHOLD,
    INSTALL_KEYWORDS,
    POWER_KEYWORDS,
    FuzzyMatcher,
    RegexMatcher,
    fuzzy_extract,
    regex_extract,
)
from .naive_bayes import NbExtractor, NbModel, classify, train_nb
from .records import AssemblyRow, ExtractionResult, Label, LabeledRow

__all__ = [
    "AssemblyRow",
    "DEFAULT_THRESHOLD",
    "ExtractionResult",
    "FuzzyMatcher",
    "INSTALL_KEYWORDS",
    "Label",
    "LabeledRow",
    "NbExtractor",
    "NbModel",
    "POWER_KEYWORDS",
    "RegexMatcher",
    "TaskAccuracy",
    "accuracy_from_labels",
    "classify",
    "cross_validated_labels",
    "evaluate_extractor",
    "fuzzy_extract",
    "levenshtein_distance",
    "regex_extract",
    "similarity",
    "train_nb",
]
