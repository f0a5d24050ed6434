"""Text emotion classifiers producing six-way probability rows.

``keyword`` is the deterministic fallback: token hits against a compact
per-emotion vocabulary with add-one smoothing.  ``distilbert`` wraps a
pretrained six-emotion checkpoint when one is cached locally.
"""

from __future__ import annotations

import re

from .formats import EMOTIONS

_TOKEN_RE = re.compile(r"[^0-9a-z]+")

KEYWORDS = {
    "sadness": ("sad", "crying", "cry", "tears", "lonely", "depressed",
                "miserable", "grief", "heartbroken", "hopeless", "hurt", "loss"),
    "joy": ("happy", "joy", "glad", "laughing", "laugh", "smile", "awesome",
            "great", "fun", "excited", "wonderful", "yay"),
    "love": ("love", "loved", "adorable", "sweetheart", "darling", "romantic",
             "kiss", "hug", "cuddle", "crush", "heart", "valentine"),
    "anger": ("angry", "mad", "furious", "rage", "hate", "annoyed",
              "frustrated", "pissed", "outraged", "disgusted", "bitter", "damn"),
    "fear": ("scared", "afraid", "terrified", "fear", "panic", "anxious",
             "worried", "nervous", "creepy", "horror", "dread", "nightmare"),
    "surprise": ("surprised", "shocked", "wow", "unexpected", "astonished",
                 "stunned", "unbelievable", "omg", "whoa", "sudden",
                 "speechless", "twist"),
}


class KeywordClassifier:
    def classify(self, text: str) -> dict[str, float]:
        tokens = [t for t in _TOKEN_RE.split(text.lower()) if t]
        hits = {e: 0 for e in EMOTIONS}
        for token in tokens:
            for e in EMOTIONS:
                if token in KEYWORDS[e]:
                    hits[e] += 1
        total = sum(hits.values()) + len(EMOTIONS)
        return {e: (hits[e] + 1) / total for e in EMOTIONS}


class DistilbertClassifier:
    """Pretrained six-emotion text classifier via transformers."""

    def __init__(self, checkpoint: str = "bhadresh-savani/distilbert-base-uncased-emotion"):
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise RuntimeError(f"distilbert backend needs transformers: {exc}")
        try:
            self.pipe = pipeline("text-classification", model=checkpoint,
                                 top_k=None, truncation=True)
        except Exception as exc:
            raise RuntimeError(f"cannot fetch checkpoint {checkpoint!r}: {exc}")

    def classify(self, text: str) -> dict[str, float]:
        scores = self.pipe(text)[0]
        probs = {item["label"].lower(): float(item["score"]) for item in scores}
        missing = set(EMOTIONS) - set(probs)
        if missing:
            raise RuntimeError(f"checkpoint lacks labels: {sorted(missing)}")
        total = sum(probs[e] for e in EMOTIONS)
        return {e: probs[e] / total for e in EMOTIONS}


def make_classifier(name: str):
    if name == "keyword":
        return KeywordClassifier()
    if name.startswith("distilbert"):
        _, _, checkpoint = name.partition(":")
        return DistilbertClassifier(checkpoint or
                                    "bhadresh-savani/distilbert-base-uncased-emotion")
    raise ValueError(f"unknown emotion backend {name!r}")
