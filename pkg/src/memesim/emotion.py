"""Per-meme emotion labels and group-level emotion aggregation.

Labels come from a sidecar CSV produced by an external text classifier
(``meme_id,label`` plus optional probability columns), or from a built-in
deterministic keyword lexicon so the pipeline runs with no model at all.
Only memes with text are labeled; the sidecar wins whenever both sources
are available.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from importlib import resources

from .corpus import Corpus
from .errors import (
    ConsistencyError,
    DataError,
    EmptyInputError,
    LabelError,
    SchemaError,
)
from .grouping import MemeGroup

# Canonical order; ties are broken by position in this tuple.
EMOTIONS = ("sadness", "joy", "love", "anger", "fear", "surprise")

_PROB_COLUMNS = tuple(f"p_{e}" for e in EMOTIONS)
_TOKEN_RE = re.compile(r"[^0-9a-z]+")

SIMPLEX_TOLERANCE = 1e-4


@dataclass(frozen=True)
class EmotionScores:
    probs: dict[str, float]

    def __post_init__(self):
        if set(self.probs) != set(EMOTIONS):
            raise DataError(f"scores must cover exactly {EMOTIONS}")
        if any(p < 0 for p in self.probs.values()):
            raise DataError("probabilities must be non-negative")
        total = sum(self.probs.values())
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise DataError(f"probabilities sum to {total:.6f}, not 1")

    def argmax(self) -> str:
        best = EMOTIONS[0]
        for e in EMOTIONS:
            if self.probs[e] > self.probs[best]:
                best = e
        return best


@dataclass(frozen=True)
class Annotation:
    label: str
    scores: EmotionScores | None
    source: str  # "sidecar" or "lexicon"


@dataclass
class EmotionAnnotations:
    by_meme: dict[str, Annotation]

    def __len__(self) -> int:
        return len(self.by_meme)

    def label_of(self, meme_id: str) -> str | None:
        ann = self.by_meme.get(meme_id)
        return ann.label if ann else None


def load_emotion_sidecar(path) -> EmotionAnnotations:
    """Parse a sidecar CSV; with probability columns, the label must be the argmax."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in ("meme_id", "label"):
            if col not in header:
                raise SchemaError(f"{path}: sidecar header missing column {col!r}")
        has_probs = all(col in header for col in _PROB_COLUMNS)
        by_meme: dict[str, Annotation] = {}
        for lineno, row in enumerate(reader, start=2):
            meme_id = (row.get("meme_id") or "").strip()
            label = (row.get("label") or "").strip().lower()
            if label not in EMOTIONS:
                raise LabelError(f"{path}: line {lineno}: unknown label {label!r}")
            scores = None
            if has_probs:
                try:
                    probs = {e: float(row[f"p_{e}"]) for e in EMOTIONS}
                except ValueError as exc:
                    raise DataError(f"{path}: line {lineno}: {exc}")
                scores = EmotionScores(probs=probs)
                if scores.argmax() != label:
                    raise ConsistencyError(
                        f"{path}: line {lineno}: label {label!r} is not the "
                        f"argmax ({scores.argmax()!r})"
                    )
            by_meme[meme_id] = Annotation(label=label, scores=scores, source="sidecar")
    return EmotionAnnotations(by_meme=by_meme)


def _load_lexicon() -> dict[str, frozenset]:
    text = resources.files("memesim.data").joinpath("emotion_lexicon.json").read_text("utf-8")
    raw = json.loads(text)
    return {e: frozenset(raw[e]) for e in EMOTIONS}


_LEXICON: dict[str, frozenset] | None = None


def classify_lexicon(text: str) -> EmotionScores:
    """Deterministic keyword-count classifier with add-one smoothing.

    A text with zero lexicon hits comes out uniform over the six labels.
    """
    if not text.strip():
        raise EmptyInputError("classify_lexicon: empty text")
    global _LEXICON
    if _LEXICON is None:
        _LEXICON = _load_lexicon()
    tokens = [t for t in _TOKEN_RE.split(text.lower()) if t]
    hits = {e: 0 for e in EMOTIONS}
    for tok in tokens:
        for e in EMOTIONS:
            if tok in _LEXICON[e]:
                hits[e] += 1
    total = sum(hits.values()) + len(EMOTIONS)
    return EmotionScores(probs={e: (hits[e] + 1) / total for e in EMOTIONS})


def annotate(corpus: Corpus,
             sidecar: EmotionAnnotations | None = None) -> EmotionAnnotations:
    """Label every text-bearing meme, preferring sidecar rows over the lexicon."""
    by_meme: dict[str, Annotation] = {}
    for rec in corpus.records:
        if not rec.text_present:
            continue
        if sidecar is not None and rec.meme_id in sidecar.by_meme:
            by_meme[rec.meme_id] = sidecar.by_meme[rec.meme_id]
        else:
            scores = classify_lexicon(rec.text)
            by_meme[rec.meme_id] = Annotation(
                label=scores.argmax(), scores=scores, source="lexicon"
            )
    return EmotionAnnotations(by_meme=by_meme)


@dataclass
class EmotionDistribution:
    rows: list[tuple[str, int, float]]  # (emotion, count, percent)

    @property
    def total(self) -> int:
        return sum(count for _, count, _ in self.rows)

    def to_json(self) -> str:
        return json.dumps(
            {
                "total": self.total,
                "rows": [
                    {"emotion": e, "count": c, "percent": p}
                    for e, c, p in self.rows
                ],
            },
            indent=2,
        )

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["emotion", "count", "percent"])
        for e, c, p in self.rows:
            writer.writerow([e, c, f"{p:.2f}"])
        return buf.getvalue()


def emotion_distribution(ann: EmotionAnnotations) -> EmotionDistribution:
    """Counts and percents per emotion over all annotated memes."""
    if not ann.by_meme:
        raise EmptyInputError("emotion_distribution: no annotations")
    counts = {e: 0 for e in EMOTIONS}
    for a in ann.by_meme.values():
        counts[a.label] += 1
    return distribution_from_counts(counts)


def distribution_from_counts(counts: dict[str, int]) -> EmotionDistribution:
    """Distribution table from raw per-emotion counts (zeros dropped)."""
    unknown = set(counts) - set(EMOTIONS)
    if unknown:
        raise LabelError(f"unknown emotion labels: {sorted(unknown)}")
    total = sum(counts.values())
    if total == 0:
        raise EmptyInputError("distribution_from_counts: all counts are zero")
    rows = [
        (e, counts[e], round(100.0 * counts[e] / total, 2))
        for e in EMOTIONS
        if counts.get(e, 0) > 0
    ]
    return EmotionDistribution(rows=rows)


UNLABELED = "unlabeled"


@dataclass(frozen=True)
class GroupEmotion:
    group_id: int
    dominant: str  # an emotion, or "unlabeled" when no member has a label
    histogram: dict[str, int]


def group_emotions(groups: list[MemeGroup],
                   ann: EmotionAnnotations) -> dict[int, GroupEmotion]:
    """Modal emotion per group, ties broken by canonical label order."""
    out: dict[int, GroupEmotion] = {}
    for g in groups:
        histogram: dict[str, int] = {}
        for meme_id in g.members:
            label = ann.label_of(meme_id) if isinstance(meme_id, str) else None
            if label is not None:
                histogram[label] = histogram.get(label, 0) + 1
        if histogram:
            best = max(histogram.values())
            dominant = next(e for e in EMOTIONS if histogram.get(e, 0) == best)
        else:
            dominant = UNLABELED
        out[g.group_id] = GroupEmotion(
            group_id=g.group_id, dominant=dominant, histogram=histogram
        )
    return out


def write_sidecar_csv(ann: EmotionAnnotations, path) -> None:
    """Write annotations in the sidecar format.

    Probability columns are emitted only when every annotation carries
    scores, since the format requires the full simplex per row.
    """
    with_probs = bool(ann.by_meme) and all(
        a.scores is not None for a in ann.by_meme.values()
    )
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if with_probs:
            writer.writerow(["meme_id", "label", *_PROB_COLUMNS])
        else:
            writer.writerow(["meme_id", "label"])
        for meme_id in sorted(ann.by_meme):
            a = ann.by_meme[meme_id]
            if with_probs:
                probs = [f"{a.scores.probs[e]:.6f}" for e in EMOTIONS]
                writer.writerow([meme_id, a.label, *probs])
            else:
                writer.writerow([meme_id, a.label])
