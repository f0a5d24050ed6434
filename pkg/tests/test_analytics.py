import os

import numpy as np
import pytest
import scipy.stats

from memesim.analytics import (
    ContingencyTable,
    chi_square,
    chi_square_survival,
    crosstab,
    load_stopwords,
    regularized_lower_gamma,
    word_frequencies,
)
from memesim.corpus import AttributeLabels, Corpus, MemeRecord, load_corpus
from memesim.emotion import Annotation, EmotionAnnotations, annotate, load_emotion_sidecar
from memesim.errors import DataError, EmptyInputError
from .conftest import FIXTURES


def _ann(mapping):
    return EmotionAnnotations(by_meme={
        k: Annotation(label=v, scores=None, source="sidecar")
        for k, v in mapping.items()
    })


def _corpus(rows):
    return Corpus(records=[
        MemeRecord(meme_id, "t", AttributeLabels(motivational=m))
        for meme_id, m in rows
    ])


# ----------------------------------------------------------------- crosstab

def test_crosstab_small_example():
    corpus = _corpus([
        ("a", "motivational"), ("b", "non_motivational"),
        ("c", "motivational"), ("d", "motivational"),
    ])
    ann = _ann({"a": "joy", "b": "joy", "c": "anger", "d": "anger"})
    table = crosstab(ann, corpus, "motivational")
    assert table.row_labels == ["joy", "anger"]
    assert table.col_labels == ["motivational", "non_motivational"]
    assert table.counts.tolist() == [[1, 1], [2, 0]]


def test_crosstab_all_unknown_attribute():
    corpus = Corpus(records=[MemeRecord("a", "t", AttributeLabels())])
    ann = _ann({"a": "joy"})
    with pytest.raises(EmptyInputError):
        crosstab(ann, corpus, "motivational")


def test_crosstab_marginals_match_distribution():
    corpus = load_corpus(os.path.join(FIXTURES, "annotated", "corpus.csv"),
                         schema="memotion")
    ann = annotate(corpus, sidecar=load_emotion_sidecar(
        os.path.join(FIXTURES, "annotated", "emotions.csv")))
    table = crosstab(ann, corpus, "motivational")
    # Row sums must equal per-emotion counts among attribute-labeled memes.
    expected = {}
    for rec in corpus.records:
        label = ann.label_of(rec.meme_id)
        if label is None or rec.attributes.motivational == "unknown":
            continue
        expected[label] = expected.get(label, 0) + 1
    for row_label, row_sum in zip(table.row_labels, table.counts.sum(axis=1)):
        assert expected[row_label] == int(row_sum)


# --------------------------------------------------------------- chi square

def test_chi_square_perfect_independence():
    table = ContingencyTable(["a", "b"], ["x", "y"], [[10, 10], [10, 10]])
    result = chi_square(table)
    assert result.statistic == 0.0
    assert result.df == 1
    assert result.p_value == 1.0


def test_chi_square_hand_case():
    table = ContingencyTable(["a", "b"], ["x", "y"], [[10, 20], [20, 10]])
    result = chi_square(table)
    assert abs(result.statistic - 6.6667) <= 1e-3
    assert result.df == 1
    assert abs(result.p_value - 0.00982) <= 1e-4


def test_chi_square_against_scipy_reference():
    rng = np.random.default_rng(23)
    for _ in range(40):
        r = int(rng.integers(2, 5))
        c = int(rng.integers(2, 5))
        counts = rng.integers(1, 60, size=(r, c))
        table = ContingencyTable(
            [f"r{i}" for i in range(r)], [f"c{j}" for j in range(c)], counts)
        ours = chi_square(table)
        ref_stat, ref_p, ref_df, _ = scipy.stats.chi2_contingency(counts, correction=False)
        assert abs(ours.statistic - ref_stat) <= 1e-9 * max(1.0, ref_stat)
        assert ours.df == ref_df
        assert abs(ours.p_value - ref_p) <= 1e-10


def test_chi_square_permutation_invariance():
    counts = np.array([[5, 9, 2], [7, 1, 11], [3, 8, 6]])
    base = chi_square(ContingencyTable(["a", "b", "c"], ["x", "y", "z"], counts))
    rng = np.random.default_rng(29)
    for _ in range(5):
        rp = rng.permutation(3)
        cp = rng.permutation(3)
        shuffled = chi_square(ContingencyTable(
            ["a", "b", "c"], ["x", "y", "z"], counts[rp][:, cp]))
        assert abs(shuffled.statistic - base.statistic) <= 1e-12


def test_chi_square_cell_scaling():
    counts = np.array([[12, 7], [5, 16]])
    base = chi_square(ContingencyTable(["a", "b"], ["x", "y"], counts))
    for k in (2, 3):
        scaled = chi_square(ContingencyTable(["a", "b"], ["x", "y"], counts * k))
        assert abs(scaled.statistic - k * base.statistic) <= 1e-12 * k * base.statistic


def test_chi_square_monotone_away_from_independence():
    previous = 1.1
    for bump in range(0, 9, 2):
        counts = [[10 + bump, 10 - bump], [10 - bump, 10 + bump]]
        p = chi_square(ContingencyTable(["a", "b"], ["x", "y"], counts)).p_value
        assert p <= previous
        previous = p


def test_survival_function_extremes():
    for df in range(1, 11):
        assert chi_square_survival(0.0, df) == 1.0
        assert chi_square_survival(100.0, df) < 1e-15


def test_regularized_gamma_against_scipy():
    import scipy.special

    rng = np.random.default_rng(31)
    for _ in range(200):
        a = float(rng.uniform(0.25, 30))
        x = float(rng.uniform(0, 60))
        assert abs(regularized_lower_gamma(a, x) - scipy.special.gammainc(a, x)) <= 1e-10


def test_yates_correction_reduces_statistic():
    table = ContingencyTable(["a", "b"], ["x", "y"], [[12, 5], [4, 13]])
    assert chi_square(table, yates=True).statistic < chi_square(table).statistic


def test_degenerate_tables_rejected():
    with pytest.raises(DataError):
        ContingencyTable(["a"], ["x", "y"], [[1, 2]])
    with pytest.raises(DataError):
        ContingencyTable(["a", "b"], ["x", "y"], [[1, 0], [2, 0]])


# ----------------------------------------------------- fixture significance

def test_fixture_significance_classification():
    corpus = load_corpus(os.path.join(FIXTURES, "annotated", "corpus.csv"),
                         schema="memotion")
    ann = annotate(corpus, sidecar=load_emotion_sidecar(
        os.path.join(FIXTURES, "annotated", "emotions.csv")))
    p_values = {}
    for attr in ("humour", "sarcasm", "offensive", "motivational", "sentiment"):
        p_values[attr] = chi_square(crosstab(ann, corpus, attr)).p_value
    assert p_values["motivational"] < 0.05
    for attr in ("humour", "sarcasm", "offensive", "sentiment"):
        assert p_values[attr] >= 0.05


# ------------------------------------------------------------- frequencies

def test_word_frequencies_basic():
    assert word_frequencies(["Free FREE meme"]) == [("free", 2), ("meme", 1)]


def test_word_frequencies_stopwords():
    assert word_frequencies(["the the the"], stopwords={"the"}) == []


def test_word_frequencies_recount_oracle():
    rng = np.random.default_rng(37)
    vocabulary = [f"w{k}" for k in range(30)] + ["the", "a", "of"]
    stopwords = frozenset({"the", "a", "of"})
    texts = [
        " ".join(vocabulary[i] for i in rng.integers(0, len(vocabulary), size=12))
        for _ in range(1000)
    ]
    freqs = word_frequencies(texts, stopwords=stopwords, top_k=10_000)
    total_tokens = sum(
        1
        for t in texts
        for tok in t.split()
        if tok not in stopwords and len(tok) >= 2
    )
    assert sum(c for _, c in freqs) == total_tokens


def test_word_frequencies_order_insensitive():
    texts = ["alpha beta", "beta gamma", "gamma alpha alpha"]
    assert word_frequencies(texts) == word_frequencies(list(reversed(texts)))


def test_word_frequencies_top_k_and_ties():
    freqs = word_frequencies(["bb aa bb aa cc"], top_k=2)
    assert freqs == [("aa", 2), ("bb", 2)]  # ties sort alphabetically


def test_builtin_stopwords_loaded():
    stopwords = load_stopwords()
    assert "the" in stopwords
    assert len(stopwords) >= 120
