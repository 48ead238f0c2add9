"""Where is each ECU installed? Three ways to read it off planning text.

The assembly plan is free text written by people, in two languages, with
typos. This demo builds a labeled corpus, shows a few rows, and compares
exact matching, fuzzy matching and a naive Bayes classifier on it.

    python3 demos/extraction_methods.py
"""

from __future__ import annotations

from dvcsched.extraction import FuzzyMatcher, RegexMatcher
from dvcsched.extraction.distance import similarity
from dvcsched.extraction.evaluation import accuracy_from_labels, cross_validated_labels, evaluate_extractor
from dvcsched.synth import CORPUS_ECU_NAMES, gen_corpus


def main() -> None:
    corpus = gen_corpus(7)
    print(f"corpus: {len(corpus)} rows, seed 7\n")
    for row in corpus[:6]:
        print(f"  [{row.label.value:<15}] {row.text}")

    # a single typo is enough to lose an exact match
    print(f"\nsimilarity('gatewy', 'gateway') = {similarity('gatewy', 'gateway')}")
    print(f"fuzzy at 90 accepts it? {FuzzyMatcher(['gateway']).label_row('gatewy verbauen').value}")
    print(f"fuzzy at 85 accepts it? {FuzzyMatcher(['gateway'], threshold=85).label_row('gatewy verbauen').value}")
    print(f"regex accepts it?       {RegexMatcher(['gateway']).label_row('gatewy verbauen').value}")

    results = {
        "regex": evaluate_extractor(RegexMatcher(CORPUS_ECU_NAMES), corpus),
        "fuzzy": evaluate_extractor(FuzzyMatcher(CORPUS_ECU_NAMES), corpus),
        # 5-fold: every row is scored by a model that never saw it
        "nb": accuracy_from_labels(corpus, cross_validated_labels(corpus)),
    }
    print(f"\n{'method':<8}{'ecu_assembly':>14}{'powered':>10}")
    for name, acc in results.items():
        print(f"{name:<8}{acc.ecu_assembly:>14.3f}{acc.powered_stations:>10.3f}")


if __name__ == "__main__":
    main()
