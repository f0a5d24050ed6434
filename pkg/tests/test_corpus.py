import csv

import pytest

from memesim.corpus import (
    ATTRIBUTES,
    AttributeLabels,
    Corpus,
    MemeRecord,
    attribute_distribution,
    load_corpus,
    normalize_attribute,
    save_corpus,
)
from memesim.errors import DuplicateIdError, EmptyInputError, SchemaError

HEADER = "image_name,text_corrected,humour,sarcasm,offensive,motivational,overall_sentiment"


def write_csv(path, rows, header=HEADER):
    path.write_text(header + "\n" + "\n".join(rows) + ("\n" if rows else ""),
                    encoding="utf-8")


def test_load_memotion_basic(tmp_path):
    p = tmp_path / "c.csv"
    write_csv(p, [
        'a.jpg,"LOOK at this",funny,sarcastic,not_offensive,motivational,very_positive',
        'b.jpg,"",not_funny,non_sarcastic,very_offensive,not_motivational,negative',
    ])
    corpus = load_corpus(p, schema="memotion")
    assert len(corpus) == 2
    a, b = corpus.records
    assert a.meme_id == "a.jpg" and a.text_present
    assert a.attributes.humour == "funny"
    assert a.attributes.offensive == "non_offensive"
    assert a.attributes.sentiment == "positive"
    assert not b.text_present
    assert b.attributes.humour == "not_funny"
    assert b.attributes.offensive == "offensive"
    assert b.attributes.motivational == "non_motivational"
    assert corpus.warnings == []


def test_load_unmapped_values_warn(tmp_path):
    p = tmp_path / "c.csv"
    write_csv(p, ['a.jpg,hi,hilarious,general,slight,motivational,neutral'])
    corpus = load_corpus(p, schema="memotion")
    attrs = corpus.records[0].attributes
    assert attrs.humour == "unknown"
    assert attrs.sarcasm == "unknown"
    assert attrs.offensive == "unknown"
    assert len(corpus.warnings) == 3


def test_normalize_attribute_stem_rule():
    assert normalize_attribute("humour", "very_funny") == ("funny", True)
    assert normalize_attribute("humour", "Not Funny") == ("not_funny", True)
    assert normalize_attribute("offensive", "hateful_offensive") == ("offensive", True)
    assert normalize_attribute("sarcasm", "twisted_meaning") == ("unknown", False)
    assert normalize_attribute("sentiment", "very_negative") == ("negative", True)
    assert normalize_attribute("motivational", "") == ("unknown", True)


def test_corpus_size_6992(tmp_path):
    p = tmp_path / "big.csv"
    rows = [f'image_{i}.jpg,text {i},funny,sarcastic,not_offensive,motivational,positive'
            for i in range(1, 6993)]
    write_csv(p, rows)
    corpus = load_corpus(p, schema="memotion")
    assert len(corpus) == 6992


def test_missing_column_is_schema_error(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("text_corrected,humour,sarcasm,offensive,motivational,overall_sentiment\n"
                 "hi,funny,sarcastic,not_offensive,motivational,positive\n")
    with pytest.raises(SchemaError, match="image_name"):
        load_corpus(p, schema="memotion")


def test_duplicate_id_error(tmp_path):
    p = tmp_path / "c.csv"
    write_csv(p, [
        "a.jpg,x,funny,sarcastic,not_offensive,motivational,positive",
        "a.jpg,y,funny,sarcastic,not_offensive,motivational,positive",
    ])
    with pytest.raises(DuplicateIdError, match="a.jpg"):
        load_corpus(p, schema="memotion")


def test_unreadable_file_is_io_error(tmp_path):
    with pytest.raises(OSError):
        load_corpus(tmp_path / "missing.csv", schema="memotion")


def test_reddit_schema(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("image,title,ups\nr1.png,nice title,10\nr2.png,other,3\n")
    corpus = load_corpus(p, schema="reddit")
    assert len(corpus) == 2
    assert corpus.records[0].meme_id == "r1.png"
    assert corpus.records[0].text == "nice title"
    assert corpus.records[0].attributes.humour == "unknown"


def test_load_is_deterministic(tmp_path):
    p = tmp_path / "c.csv"
    write_csv(p, ['a.jpg,"x, y",funny,sarcastic,not_offensive,motivational,positive'])
    assert load_corpus(p, "memotion").records == load_corpus(p, "memotion").records


def test_round_trip(tmp_path):
    p = tmp_path / "c.csv"
    write_csv(p, [
        'a.jpg,"quoted, text",very_funny,sarcastic,not_offensive,motivational,very_positive',
        "b.jpg,,not_funny,non_sarcastic,offensive,not_motivational,neutral",
    ])
    corpus = load_corpus(p, schema="memotion")
    q = tmp_path / "out.csv"
    save_corpus(corpus, q)
    again = load_corpus(q, schema="memotion")
    assert again.records == corpus.records


def _distribution_rows(records):
    return Corpus(records=list(records))


def test_attribute_distribution_small():
    records = [
        MemeRecord(f"m{i}.jpg", "x", AttributeLabels(sentiment=s))
        for i, s in enumerate(["positive", "positive", "negative", "neutral"])
    ]
    table = attribute_distribution(_distribution_rows(records), "sentiment")
    assert table.rows == [
        ("positive", 2, 50.0),
        ("negative", 1, 25.0),
        ("neutral", 1, 25.0),
    ]


def test_attribute_distribution_single_label():
    records = [MemeRecord(f"m{i}.jpg", "x", AttributeLabels(humour="funny"))
               for i in range(9)]
    table = attribute_distribution(_distribution_rows(records), "humour")
    assert table.rows == [("funny", 9, 100.0)]


def test_distribution_against_one_pass_count_oracle():
    # Independent oracle: a direct csv one-pass tally of the shipped fixture.
    import os

    from .conftest import FIXTURES

    path = os.path.join(FIXTURES, "annotated", "corpus.csv")
    oracle = {}
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            oracle[row["overall_sentiment"]] = oracle.get(row["overall_sentiment"], 0) + 1
    corpus = load_corpus(path, schema="memotion")
    table = attribute_distribution(corpus, "sentiment")
    assert {label: c for label, c, _ in table.rows} == oracle
    assert sum(c for _, c, _ in table.rows) == len(corpus)
    assert abs(sum(p for _, _, p in table.rows) - 100.0) <= 0.01


def test_counts_sum_exactly_for_every_attribute(tmp_path):
    p = tmp_path / "c.csv"
    rows = [
        f'm{i}.jpg,t{i},{h},{s},{o},{m},{v}'
        for i, (h, s, o, m, v) in enumerate([
            ("funny", "sarcastic", "offensive", "motivational", "positive"),
            ("not_funny", "non_sarcastic", "not_offensive", "not_motivational", "negative"),
            ("hilarious", "general", "slight", "motivational", "neutral"),
        ])
    ]
    write_csv(p, rows)
    corpus = load_corpus(p, schema="memotion")
    for attr in ATTRIBUTES:
        table = attribute_distribution(corpus, attr)
        assert table.total == len(corpus)


def test_empty_corpus_distribution():
    with pytest.raises(EmptyInputError):
        attribute_distribution(Corpus(records=[]), "humour")


def test_unknown_attribute_rejected(store20=None):
    records = [MemeRecord("a.jpg", "x", AttributeLabels())]
    with pytest.raises(SchemaError):
        attribute_distribution(Corpus(records=records), "color")
