"""TF-IDF features with a Gaussian naive Bayes classifier."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import InsufficientCorpus
from ..text import clean_text, tokenize
from .records import AssemblyRow, ExtractionResult, Label, LabeledRow

VAR_SMOOTHING = 1e-9
MODEL_VERSION = "nb-v1"


@dataclass
class NbModel:
    vocabulary: list[str]
    idf: np.ndarray
    classes: list[Label]
    priors: np.ndarray
    means: np.ndarray  # (n_classes, n_terms)
    variances: np.ndarray  # floor already added

    def __post_init__(self) -> None:
        self._index = {t: i for i, t in enumerate(self.vocabulary)}

    def vectorize(self, text: str) -> np.ndarray:
        vec = np.zeros(len(self.vocabulary))
        for tok, n in Counter(tokenize(text)).items():
            i = self._index.get(tok)
            if i is not None:
                vec[i] = n * self.idf[i]
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def to_json(self) -> str:
        doc = {
            "version": MODEL_VERSION,
            "vocabulary": self.vocabulary,
            "idf": self.idf.tolist(),
            "classes": [c.value for c in self.classes],
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NbModel":
        doc = json.loads(text)
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        return cls(
            vocabulary=list(doc["vocabulary"]),
            idf=np.asarray(doc["idf"], dtype=float),
            classes=[Label(c) for c in doc["classes"]],
            priors=np.asarray(doc["priors"], dtype=float),
            means=np.asarray(doc["means"], dtype=float).reshape(len(doc["classes"]), -1),
            variances=np.asarray(doc["variances"], dtype=float).reshape(len(doc["classes"]), -1),
        )


def tfidf_matrix(docs: list[list[str]], vocabulary: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Smoothed idf ``ln((1+N)/(1+df)) + 1`` and L2-normalized tf-idf rows."""
    index = {t: i for i, t in enumerate(vocabulary)}
    tf = np.zeros((len(docs), len(vocabulary)))
    for r, toks in enumerate(docs):
        for tok, n in Counter(toks).items():
            tf[r, index[tok]] = n
    df = (tf > 0).sum(axis=0)
    idf = np.log((1.0 + len(docs)) / (1.0 + df)) + 1.0
    x = tf * idf
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    x = np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)
    return x, idf


def train_nb(corpus: list[LabeledRow], min_rows_per_class: int = 10) -> NbModel:
    counts = Counter(row.label for row in corpus)
    classes = [c for c in Label if counts[c] > 0]
    if len(classes) < 2:
        raise InsufficientCorpus("need at least two classes")
    short = [c.value for c in classes if counts[c] < min_rows_per_class]
    if short:
        raise InsufficientCorpus(f"fewer than {min_rows_per_class} rows for {', '.join(short)}")

    docs = [tokenize(row.text) for row in corpus]
    vocabulary = sorted({t for d in docs for t in d})
    x, idf = tfidf_matrix(docs, vocabulary)
    labels = np.array([classes.index(row.label) for row in corpus])

    priors = np.array([counts[c] for c in classes], dtype=float) / len(corpus)
    means = np.vstack([x[labels == k].mean(axis=0) for k in range(len(classes))])
    variances = np.vstack([x[labels == k].var(axis=0) for k in range(len(classes))])
    floor = VAR_SMOOTHING * float(x.var(axis=0).max()) if x.size else 0.0
    variances = variances + (floor if floor > 0 else VAR_SMOOTHING)
    return NbModel(vocabulary, idf, classes, priors, means, variances)


def joint_log_likelihood(model: NbModel, vec: np.ndarray) -> np.ndarray:
    var = model.variances
    ll = -0.5 * np.sum(np.log(2.0 * math.pi * var), axis=1)
    ll = ll - 0.5 * np.sum((vec - model.means) ** 2 / var, axis=1)
    return np.log(model.priors) + ll


def classify(model: NbModel, row: str) -> tuple[Label, dict[Label, float]]:
    """Most probable class and the normalized posterior.

    A row with no known term carries no evidence, so the posterior is the
    prior.
    """
    vec = model.vectorize(row)
    if not vec.any():
        post = model.priors.copy()
    else:
        jll = joint_log_likelihood(model, vec)
        # log-likelihoods can reach 1e8 under the variance floor; dividing by
        # the sum (not subtracting logsumexp) keeps the total at 1 to rounding
        post = np.exp(jll - jll.max())
        post /= post.sum()
    k = int(np.argmax(post))
    return model.classes[k], {c: float(p) for c, p in zip(model.classes, post)}


class NbExtractor:
    """Row labels come from the classifier. On assembly rows, the ECU itself is
    found by fuzzy name matching (no keyword needed, the label already says
    "assembly")."""

    def __init__(self, model: NbModel, ecu_names=(), threshold: int = 90):
        from .matchers import FuzzyMatcher

        self.model = model
        self._names = FuzzyMatcher(ecu_names, threshold=threshold)

    def label_row(self, text: str) -> Label:
        return classify(self.model, text)[0]

    def extract(self, rows: Iterable[AssemblyRow]) -> ExtractionResult:
        result = ExtractionResult()
        for row in rows:
            label = self.label_row(row.text)
            if label is Label.ECU_ASSEMBLY:
                hits = self._names.ecu_hits(clean_text(row.text))
                for name in hits:
                    prev = result.ecu_stations.get(name)
                    if prev is None or row.station < prev:
                        result.ecu_stations[name] = row.station
                if not hits:
                    label = Label.NEITHER
            elif label is Label.POWERED_STATION:
                result.powered_stations.add(row.station)
            result.per_row_decisions.append((row.line_no, label))
        return result
