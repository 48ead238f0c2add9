"""Text normalization applied to every free-text field."""

from __future__ import annotations

_UMLAUTS = str.maketrans({"ä": "ae", "ö": "oe", "ü": "ue", "ß": "ss"})


def clean_text(raw: str) -> str:
    """Lowercase, transliterate umlauts, collapse whitespace.

    >>> clean_text("Türverkleidung  montieren")
    'tuerverkleidung montieren'
    """
    return " ".join(raw.lower().translate(_UMLAUTS).split())


def tokenize(text: str) -> list[str]:
    return clean_text(text).split()
