"""Exception hierarchy used across the package."""

from __future__ import annotations

from collections import Counter


class DvcError(Exception):
    """Base class for all package errors."""


class DataError(DvcError):
    """Input data could not be turned into domain objects."""


class SchemaError(DataError):
    """A CSV header is missing or renamed."""


class RowError(DataError):
    def __init__(self, line_no: int, message: str, source: str = ""):
        self.line_no = line_no
        self.message = message
        self.source = source
        prefix = f"{source}:" if source else "line "
        super().__init__(f"{prefix}{line_no}: {message}")


class EmptyFile(DataError):
    """The file has a header but no data rows (or no content at all)."""


class InvalidInstance(DataError):
    """The instance breaks a structural invariant."""


class UnknownEcu(DvcError):
    pass


class UnknownStation(DvcError):
    pass


class Infeasible(DvcError):
    """No station admits a task.

    ``histogram`` counts, per rule, how many candidate stations were rejected
    by that rule while scanning for the task.
    """

    def __init__(self, task_key: tuple[str, str], histogram: Counter | None = None):
        self.task_key = task_key
        self.histogram = Counter(histogram or {})
        rules = ", ".join(f"{rule}={n}" for rule, n in sorted(self.histogram.items()))
        super().__init__(f"no admissible station for {task_key[0]}/{task_key[1]} ({rules})")


class InfeasibleSchedule(DvcError):
    """A schedule fails the constraint replay."""


class EmptySchedule(DvcError):
    pass


class TooLarge(DvcError):
    pass


class InfeasibleProfile(DvcError):
    pass


class EmptyEcuList(DvcError):
    pass


class InsufficientCorpus(DvcError):
    pass


class MissingSource(DataError):
    """A required input file is absent from an instance directory."""
