#!/usr/bin/env python3
"""Regenerate the committed fixtures under fixtures/.

Two bundles:

* fixtures/survey/ -- a 21-group corpus with sidecar labels, placeholder
  images, and a 51-participant response log whose per-group agreement
  rates hit known reference values.
* fixtures/annotated/ -- a 705-meme corpus (5 without text) plus a
  700-row emotion sidecar constructed so the emotion-vs-motivational
  chi-square lands significant at alpha=0.05 while the other four
  attributes stay non-significant.

Deterministic end to end: rerunning the script reproduces identical bytes.
"""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from memesim.analytics import ContingencyTable, chi_square  # noqa: E402
from memesim.emotion import EMOTIONS  # noqa: E402

ROOT = os.path.normpath(os.path.join(os.path.dirname(__file__), ".."))
FIXTURES = os.path.join(ROOT, "fixtures")

# Yes-counts out of 51 participants; 100*k/51 rounds to the per-group
# agreement rates used across the test suite.
YES_COUNTS = [33, 23, 36, 27, 31, 36, 34, 42, 40, 31, 41, 36,
              29, 30, 34, 35, 39, 38, 31, 38, 36]

GROUP_TEXTS = {
    "sadness": "when the weekend ends and the tears start",
    "joy": "that happy dance when the pizza arrives",
    "love": "sending a hug to my favorite person",
    "anger": "me furious because the wifi died again",
    "fear": "opening the electricity bill is pure terror",
    "surprise": "plot twist nobody saw coming wow",
}

ATTRS_CYCLE = [
    ("funny", "sarcastic", "non_offensive", "non_motivational", "positive"),
    ("funny", "non_sarcastic", "non_offensive", "motivational", "neutral"),
    ("not_funny", "sarcastic", "offensive", "non_motivational", "negative"),
]


def write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def group_color_pairs(n_groups: int) -> list[tuple[int, int]]:
    """First n distinct anchor-color pairs, in a fixed enumeration order."""
    from memeadapter.encoders import CONCEPTS

    pairs = [(i, j) for i in range(len(CONCEPTS)) for j in range(i + 1, len(CONCEPTS))]
    return pairs[:n_groups]


def make_survey_bundle() -> None:
    from memeadapter.encoders import CONCEPTS

    base = os.path.join(FIXTURES, "survey")
    n_groups = len(YES_COUNTS)
    dominants = [EMOTIONS[g % len(EMOTIONS)] for g in range(n_groups)]
    # Each group gets its own pair of anchor colors: the images are two-tone
    # in those colors and the captions name them, so the toy joint encoder
    # reproduces exactly these groups from the pixels and words alone.
    pairs = group_color_pairs(n_groups)

    corpus_lines = ["image_name,text_corrected,humour,sarcasm,offensive,motivational,overall_sentiment"]
    sidecar_lines = ["meme_id,label"]
    groups = []
    for g in range(n_groups):
        members = []
        word_a, _ = CONCEPTS[pairs[g][0]]
        word_b, _ = CONCEPTS[pairs[g][1]]
        for k in range(3):
            idx = g * 3 + k + 1
            meme_id = f"meme_{idx:03d}.png"
            members.append(meme_id)
            text = f"{GROUP_TEXTS[dominants[g]]} in {word_a} and {word_b} #{idx}"
            attrs = ATTRS_CYCLE[k % len(ATTRS_CYCLE)]
            corpus_lines.append(",".join([meme_id, f'"{text}"', *attrs]))
            sidecar_lines.append(f"{meme_id},{dominants[g]}")
        groups.append({"group_id": g, "members": members})

    write(os.path.join(base, "corpus.csv"), "\n".join(corpus_lines) + "\n")
    write(os.path.join(base, "emotions.csv"), "\n".join(sidecar_lines) + "\n")
    write(os.path.join(base, "groups.json"), json.dumps(groups, indent=2) + "\n")

    response_lines = []
    for g in range(n_groups):
        for k in range(1, 52):
            obj = {
                "participant_id": f"p{k:02d}",
                "group_id": g,
                "similar": k <= YES_COUNTS[g],
                "timestamp": 1710000000 + g * 100 + k,
            }
            if k % 17 != 0:  # a few participants skip the emotion question
                if k % 10 < 7:
                    obj["emotion"] = dominants[g]
                else:
                    obj["emotion"] = EMOTIONS[(g + k) % len(EMOTIONS)]
            response_lines.append(json.dumps(obj, separators=(",", ":")))
    write(os.path.join(base, "responses.jsonl"), "\n".join(response_lines) + "\n")

    from PIL import Image

    image_dir = os.path.join(base, "images")
    os.makedirs(image_dir, exist_ok=True)
    for g in range(n_groups):
        (_, rgb_a), (_, rgb_b) = CONCEPTS[pairs[g][0]], CONCEPTS[pairs[g][1]]
        for k in range(3):
            idx = g * 3 + k + 1
            shade_a = tuple(min(255, c + 6 * k) for c in rgb_a)
            shade_b = tuple(min(255, c + 6 * k) for c in rgb_b)
            img = Image.new("RGB", (96, 96), shade_a)
            img.paste(Image.new("RGB", (48, 96), shade_b), (48, 0))
            img.save(os.path.join(image_dir, f"meme_{idx:03d}.png"))


# ------------------------------------------------------------------ annotated

EMOTION_COUNTS = {"joy": 312, "anger": 238, "fear": 63, "sadness": 62,
                  "surprise": 14, "love": 11}

NEUTRAL_SPLITS = {
    "humour": (("funny", 0.62), ("not_funny", 0.38)),
    "sarcasm": (("sarcastic", 0.55), ("non_sarcastic", 0.45)),
    "offensive": (("offensive", 0.30), ("non_offensive", 0.70)),
    "sentiment": (("positive", 0.45), ("negative", 0.33), ("neutral", 0.22)),
}

# Direction of the motivational skew per emotion (scaled during calibration).
MOTIVATIONAL_BASE = 0.30
MOTIVATIONAL_DIRECTION = {"joy": 1.0, "anger": -1.0, "fear": -0.8,
                          "sadness": 1.6, "surprise": 0.0, "love": 0.0}

TEXT_NOUNS = ["meme", "monday", "cat", "exam", "coffee", "deadline", "group chat",
              "homework", "budget", "traffic", "meeting", "update"]
TEXT_KEYWORDS = {
    "sadness": ["sad", "crying", "lonely", "miserable"],
    "joy": ["happy", "laughing", "awesome", "wonderful"],
    "love": ["love", "adorable", "sweetheart", "hug"],
    "anger": ["angry", "furious", "annoying", "rage"],
    "fear": ["scared", "terrified", "panic", "creepy"],
    "surprise": ["shocked", "unexpected", "wow", "stunned"],
}


def spread_counts(n: int, split) -> list[int]:
    # Largest-remainder allocation so level proportions match per emotion.
    raw = [n * q for _, q in split]
    counts = [int(x) for x in raw]
    rest = n - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: raw[i] - counts[i], reverse=True)
    for i in order[:rest]:
        counts[i] += 1
    return counts


def stride_assign(n: int, counts: list[int], labels: list[str]) -> list[str]:
    # Interleave levels evenly instead of blocking them together.
    out = [None] * n
    slots = list(range(n))
    for label, count in sorted(zip(labels, counts), key=lambda lc: -lc[1]):
        if count == 0:
            continue
        step = len(slots) / count
        picked = [slots[min(int(i * step), len(slots) - 1)] for i in range(count)]
        picked = sorted(set(picked))
        k = 0
        while len(picked) < count:  # collisions from rounding
            if slots[k] not in picked:
                picked.append(slots[k])
            k += 1
        for s in picked[:count]:
            out[s] = label
        slots = [s for s in slots if s not in set(picked[:count])]
    for s in slots:
        out[s] = labels[0]
    return out


def motivational_table(scale: float) -> tuple[dict[str, int], int]:
    per_emotion = {}
    for e, n in EMOTION_COUNTS.items():
        q = MOTIVATIONAL_BASE + scale * MOTIVATIONAL_DIRECTION[e]
        q = min(max(q, 0.02), 0.98)
        per_emotion[e] = max(1, min(n - 1, round(n * q)))
    counts = [[per_emotion[e], EMOTION_COUNTS[e] - per_emotion[e]] for e in EMOTIONS]
    table = ContingencyTable(
        row_labels=list(EMOTIONS),
        col_labels=["motivational", "non_motivational"],
        counts=counts,
    )
    return per_emotion, chi_square(table).p_value


def calibrate_motivational() -> dict[str, int]:
    # Smallest skew whose p-value lands in the target significance band.
    for step in range(1, 200):
        scale = step / 1000.0
        per_emotion, p = motivational_table(scale)
        if p < 0.048:
            assert p > 0.005, f"overshot: p={p}"
            print(f"motivational skew {scale:.3f}: p={p:.4f}")
            return per_emotion
    raise AssertionError("no skew produced a significant table")


def make_annotated_bundle() -> None:
    base = os.path.join(FIXTURES, "annotated")
    motivational_counts = calibrate_motivational()

    memes = []  # (meme_id, text, attrs dict, emotion or None)
    idx = 0
    for e in EMOTIONS:
        n = EMOTION_COUNTS[e]
        columns = {}
        for attr, split in NEUTRAL_SPLITS.items():
            labels = [lab for lab, _ in split]
            columns[attr] = stride_assign(n, spread_counts(n, split), labels)
        m = motivational_counts[e]
        columns["motivational"] = stride_assign(
            n, [m, n - m], ["motivational", "non_motivational"]
        )
        keywords = TEXT_KEYWORDS[e]
        for k in range(n):
            idx += 1
            noun = TEXT_NOUNS[(idx * 7) % len(TEXT_NOUNS)]
            word = keywords[k % len(keywords)]
            text = f"when the {noun} gets {word} again"
            attrs = {attr: columns[attr][k] for attr in columns}
            memes.append((f"m{idx:04d}.jpg", text, attrs, e))
    for _ in range(5):  # memes without text: excluded from emotion analytics
        idx += 1
        attrs = {"humour": "funny", "sarcasm": "non_sarcastic",
                 "offensive": "non_offensive", "motivational": "non_motivational",
                 "sentiment": "neutral"}
        memes.append((f"m{idx:04d}.jpg", "", attrs, None))

    corpus_lines = ["image_name,text_corrected,humour,sarcasm,offensive,motivational,overall_sentiment"]
    sidecar_lines = ["meme_id,label"]
    for meme_id, text, attrs, e in memes:
        corpus_lines.append(",".join([
            meme_id, f'"{text}"', attrs["humour"], attrs["sarcasm"],
            attrs["offensive"], attrs["motivational"], attrs["sentiment"],
        ]))
        if e is not None:
            sidecar_lines.append(f"{meme_id},{e}")
    write(os.path.join(base, "corpus.csv"), "\n".join(corpus_lines) + "\n")
    write(os.path.join(base, "emotions.csv"), "\n".join(sidecar_lines) + "\n")
    print(f"annotated bundle: {len(memes)} memes, {len(sidecar_lines) - 1} labeled")


if __name__ == "__main__":
    make_survey_bundle()
    print("survey bundle written")
    make_annotated_bundle()
