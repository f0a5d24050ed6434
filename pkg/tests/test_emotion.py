import pytest

from memesim.corpus import AttributeLabels, Corpus, MemeRecord
from memesim.emotion import (
    EMOTIONS,
    Annotation,
    EmotionAnnotations,
    EmotionScores,
    annotate,
    classify_lexicon,
    distribution_from_counts,
    emotion_distribution,
    group_emotions,
    load_emotion_sidecar,
    write_sidecar_csv,
)
from memesim.errors import (
    ConsistencyError,
    DataError,
    EmptyInputError,
    LabelError,
)
from memesim.grouping import MemeGroup


def test_label_order_is_canonical():
    assert EMOTIONS == ("sadness", "joy", "love", "anger", "fear", "surprise")


# ------------------------------------------------------------------ sidecar

def test_sidecar_plain_label(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("meme_id,label\nimage_1.jpg,joy\n")
    ann = load_emotion_sidecar(p)
    got = ann.by_meme["image_1.jpg"]
    assert got.label == "joy"
    assert got.scores is None
    assert got.source == "sidecar"


PROB_HEADER = "meme_id,label,p_sadness,p_joy,p_love,p_anger,p_fear,p_surprise"


def test_sidecar_probs_consistent(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(PROB_HEADER + "\nimage_1.jpg,joy,0.1,0.6,0.05,0.1,0.1,0.05\n")
    ann = load_emotion_sidecar(p)
    assert ann.by_meme["image_1.jpg"].scores.argmax() == "joy"


def test_sidecar_label_argmax_mismatch(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(PROB_HEADER + "\nimage_1.jpg,anger,0.1,0.6,0.05,0.1,0.1,0.05\n")
    with pytest.raises(ConsistencyError):
        load_emotion_sidecar(p)


def test_sidecar_unknown_label(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("meme_id,label\nimage_1.jpg,ennui\n")
    with pytest.raises(LabelError):
        load_emotion_sidecar(p)


def test_sidecar_simplex_violation(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(PROB_HEADER + "\nimage_1.jpg,joy,0.5,0.6,0.05,0.1,0.1,0.05\n")
    with pytest.raises(DataError):
        load_emotion_sidecar(p)


def test_scores_tie_breaks_canonically():
    s = EmotionScores(probs={
        "sadness": 0.25, "joy": 0.25, "love": 0.125,
        "anger": 0.125, "fear": 0.125, "surprise": 0.125,
    })
    assert s.argmax() == "sadness"


# ------------------------------------------------------------------ lexicon

def test_lexicon_single_hit():
    assert classify_lexicon("nothing but love here").argmax() == "love"


def test_lexicon_zero_hits_uniform():
    scores = classify_lexicon("qwerty zxcvb plomp")
    for p in scores.probs.values():
        assert abs(p - 1 / 6) <= 1e-9


def test_lexicon_sums_to_one_over_random_strings():
    import random

    rng = random.Random(17)
    alphabet = "abcdefghijklmnopqrstuvwxyz "
    for _ in range(1000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 60)))
        if not text.strip():
            text = "x"
        scores = classify_lexicon(text)
        assert abs(sum(scores.probs.values()) - 1.0) <= 1e-9


def test_lexicon_pure_function():
    text = "so happy yet so scared of the surprise"
    assert classify_lexicon(text) == classify_lexicon(text)


def test_lexicon_empty_text():
    with pytest.raises(EmptyInputError):
        classify_lexicon("   ")


# ----------------------------------------------------------------- annotate

def _corpus(rows):
    return Corpus(records=[
        MemeRecord(meme_id, text, AttributeLabels()) for meme_id, text in rows
    ])


def test_annotate_sidecar_wins_lexicon_fills(tmp_path):
    corpus = _corpus([("a.jpg", "angry rage text"), ("b.jpg", "happy smile"),
                      ("c.jpg", "")])
    p = tmp_path / "s.csv"
    p.write_text("meme_id,label\na.jpg,surprise\n")
    ann = annotate(corpus, sidecar=load_emotion_sidecar(p))
    assert ann.by_meme["a.jpg"].label == "surprise"  # sidecar beats lexicon
    assert ann.by_meme["a.jpg"].source == "sidecar"
    assert ann.by_meme["b.jpg"].label == "joy"
    assert ann.by_meme["b.jpg"].source == "lexicon"
    assert "c.jpg" not in ann.by_meme  # text-absent memes never annotated
    assert len(ann) == 2


def test_annotate_coverage_never_exceeds_corpus():
    corpus = _corpus([("a.jpg", "x y z"), ("b.jpg", "")])
    ann = annotate(corpus)
    assert set(ann.by_meme) <= set(corpus.ids)
    assert len(ann) == 1


# ------------------------------------------------------------- distribution

def test_distribution_paper_style_counts():
    counts = {"joy": 3120, "anger": 2374, "fear": 629,
              "sadness": 627, "surprise": 143, "love": 94}
    table = distribution_from_counts(counts)
    assert table.total == 6987
    got = {e: (c, p) for e, c, p in table.rows}
    assert got["joy"] == (3120, 44.65)
    assert got["anger"] == (2374, 33.98)
    assert got["fear"] == (629, 9.00)
    assert got["sadness"] == (627, 8.97)
    assert got["surprise"] == (143, 2.05)
    assert got["love"] == (94, 1.35)


def test_distribution_single_annotation():
    ann = EmotionAnnotations(by_meme={
        "a.jpg": Annotation(label="fear", scores=None, source="sidecar"),
    })
    table = emotion_distribution(ann)
    assert table.rows == [("fear", 1, 100.0)]


def test_distribution_counts_sum_exactly():
    ann = EmotionAnnotations(by_meme={
        f"m{i}.jpg": Annotation(label=EMOTIONS[i % 6], scores=None, source="sidecar")
        for i in range(37)
    })
    table = emotion_distribution(ann)
    assert table.total == 37


def test_distribution_empty():
    with pytest.raises(EmptyInputError):
        emotion_distribution(EmotionAnnotations(by_meme={}))


# ------------------------------------------------------------ group labels

def _ann(mapping):
    return EmotionAnnotations(by_meme={
        k: Annotation(label=v, scores=None, source="sidecar")
        for k, v in mapping.items()
    })


def test_group_dominant_modal():
    groups = [MemeGroup(group_id=0, members=("a", "b", "c"), size=3)]
    ann = _ann({"a": "joy", "b": "joy", "c": "anger"})
    assert group_emotions(groups, ann)[0].dominant == "joy"


def test_group_dominant_tie_canonical_order():
    groups = [MemeGroup(group_id=0, members=("a", "b"), size=2)]
    ann = _ann({"a": "joy", "b": "anger"})
    # joy precedes anger in the canonical order, so the tie goes to joy
    assert group_emotions(groups, ann)[0].dominant == "joy"


def test_group_without_labels_is_unlabeled():
    groups = [MemeGroup(group_id=0, members=("a", "b"), size=2)]
    info = group_emotions(groups, _ann({}))[0]
    assert info.dominant == "unlabeled"
    assert info.histogram == {}


# ------------------------------------------------------------------ sidecar io

def test_write_sidecar_round_trip(tmp_path):
    corpus = _corpus([("a.jpg", "angry rage text"), ("b.jpg", "happy smile")])
    ann = annotate(corpus)
    p = tmp_path / "out.csv"
    write_sidecar_csv(ann, p)
    again = load_emotion_sidecar(p)
    for meme_id, a in ann.by_meme.items():
        assert again.by_meme[meme_id].label == a.label
