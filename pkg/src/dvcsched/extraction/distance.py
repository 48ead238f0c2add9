"""Unit-cost Levenshtein distance and the percent similarity built on it."""

from __future__ import annotations


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum number of single-character inserts, deletes and substitutions.

    >>> levenshtein_distance("kitten", "sitting")
    3
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> int:
    """``round(100 * (1 - d / max(len)))`` with halves rounded up; 100 for two empty strings."""
    m = max(len(a), len(b))
    if m == 0:
        return 100
    d = levenshtein_distance(a, b)
    # exact half-up rounding in integers
    return (200 * (m - d) + m) // (2 * m)
