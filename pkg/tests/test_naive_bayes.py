import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dvcsched.errors import InsufficientCorpus
from dvcsched.extraction.naive_bayes import NbExtractor, NbModel, classify, train_nb
from dvcsched.extraction.records import AssemblyRow, Label, LabeledRow

ASM, PWR, NEI = Label.ECU_ASSEMBLY, Label.POWERED_STATION, Label.NEITHER


def row(text, label, name=None):
    return LabeledRow(text, label, 1, name or ("gateway" if label is ASM else None))


TOY = [
    row("gateway verbauen", ASM),
    row("radio montieren", ASM, "radio"),
    row("fahrzeug bestromt", PWR),
    row("strom anlegen", PWR),
]


def test_separable_toy_classifies_training_rows():
    model = train_nb(TOY, min_rows_per_class=1)
    for r in TOY:
        assert classify(model, r.text)[0] is r.label


def test_single_class_corpus():
    with pytest.raises(InsufficientCorpus):
        train_nb([row("a", NEI)] * 20)


def test_min_rows_per_class_enforced():
    with pytest.raises(InsufficientCorpus):
        train_nb(TOY)


def test_priors_on_corpus_split():
    corpus = [row(f"gateway verbauen {i}", ASM) for i in range(250)]
    corpus += [row(f"bestromt {i}", PWR) for i in range(250)]
    corpus += [row(f"teppich {i}", NEI) for i in range(500)]
    model = train_nb(corpus)
    assert model.classes == [ASM, PWR, NEI]
    assert model.priors.tolist() == pytest.approx([0.25, 0.25, 0.5], abs=1e-12)
    assert model.priors.sum() == pytest.approx(1.0, abs=1e-9)


def test_out_of_vocabulary_returns_prior():
    corpus = TOY + [row("teppich einlegen", NEI), row("kabel verlegen", NEI), row("scheibe kleben", NEI)]
    model = train_nb(corpus, min_rows_per_class=1)
    label, post = classify(model, "voellig unbekannt")
    assert label is NEI
    assert post == pytest.approx({ASM: 2 / 7, PWR: 2 / 7, NEI: 3 / 7}, abs=1e-12)


def test_posterior_matches_hand_computation():
    corpus = [row("a", PWR), row("a a b", PWR), row("b", NEI), row("b b a", NEI)]
    model = train_nb(corpus, min_rows_per_class=1)

    # idf is identical for both terms, so it cancels after L2 normalization
    r5 = math.sqrt(5)
    x = {PWR: [(1.0, 0.0), (2 / r5, 1 / r5)], NEI: [(0.0, 1.0), (1 / r5, 2 / r5)]}
    allrows = x[PWR] + x[NEI]

    def pvar(vals):
        m = sum(vals) / len(vals)
        return sum((v - m) ** 2 for v in vals) / len(vals)

    floor = 1e-9 * max(pvar([r[j] for r in allrows]) for j in range(2))
    q = (1 / math.sqrt(2), 1 / math.sqrt(2))

    def log_joint(label):
        total = math.log(0.5)
        for j in range(2):
            vals = [r[j] for r in x[label]]
            mu = sum(vals) / 2
            var = pvar(vals) + floor
            total += -0.5 * math.log(2 * math.pi * var) - (q[j] - mu) ** 2 / (2 * var)
        return total

    lp, ln = log_joint(PWR), log_joint(NEI)
    top = max(lp, ln)
    z = math.exp(lp - top) + math.exp(ln - top)
    expected = {PWR: math.exp(lp - top) / z, NEI: math.exp(ln - top) / z}

    _, post = classify(model, "a b")
    assert post[PWR] == pytest.approx(expected[PWR], abs=1e-9)
    assert post[NEI] == pytest.approx(expected[NEI], abs=1e-9)


def test_model_invariants_and_json_roundtrip():
    model = train_nb(TOY, min_rows_per_class=1)
    assert np.all(model.idf >= 0)
    assert np.all(model.variances > 0)
    again = NbModel.from_json(model.to_json())
    assert again.vocabulary == model.vocabulary and again.classes == model.classes
    for attr in ("idf", "priors", "means", "variances"):
        assert np.array_equal(getattr(again, attr), getattr(model, attr))
    assert classify(again, "gateway verbauen") == classify(model, "gateway verbauen")
    assert '"version": "nb-v1"' in model.to_json()


def test_from_json_rejects_other_version():
    with pytest.raises(ValueError):
        NbModel.from_json('{"version": "nb-v0"}')


def test_extractor_uses_names_on_assembly_rows():
    ex = NbExtractor(train_nb(TOY, min_rows_per_class=1), ["gateway", "radio"])
    res = ex.extract([AssemblyRow(2, 6, "gateway verbauen"), AssemblyRow(3, 4, "radio montieren"),
                      AssemblyRow(4, 8, "fahrzeug bestromt")])
    assert res.ecu_stations == {"gateway": 6, "radio": 4}
    assert res.powered_stations == {8}


tokens = st.sampled_from(["gateway", "radio", "verbauen", "strom", "bestromt", "teppich", "kabel", "x"])
texts = st.lists(tokens, min_size=1, max_size=4).map(" ".join)


@settings(max_examples=40)
@given(st.lists(st.tuples(texts, st.sampled_from([PWR, NEI])), min_size=4, max_size=12), texts)
def test_posterior_normalized_and_equivariant(data, query):
    corpus = [row(t, lab) for t, lab in data]
    if len({lab for _, lab in data}) < 2:
        return
    swap = {PWR: NEI, NEI: PWR}
    _, post = classify(train_nb(corpus, min_rows_per_class=1), query)
    _, post_swapped = classify(train_nb([row(t, swap[lab]) for t, lab in data], min_rows_per_class=1), query)
    assert sum(post.values()) == pytest.approx(1.0, abs=1e-9)
    for lab in (PWR, NEI):
        assert post[lab] == pytest.approx(post_swapped[swap[lab]], abs=1e-9)
