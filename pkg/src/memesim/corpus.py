"""Meme corpus loading, validation, and attribute summaries.

A corpus is an ordered list of records read from a CSV file.  Two header
layouts are understood:

* ``memotion`` -- columns ``image_name``, ``text_corrected``, plus the five
  attribute columns ``humour``, ``sarcasm``, ``offensive``, ``motivational``,
  ``overall_sentiment``.
* ``reddit`` -- columns ``image`` and ``title`` only; all attributes load
  as ``unknown``.

File order is canonical: every downstream matrix and group report indexes
memes by their position in the source file.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import DataError, DuplicateIdError, EmptyInputError, SchemaError

UNKNOWN = "unknown"

# Canonical value sets per attribute (besides UNKNOWN, allowed everywhere).
ATTRIBUTES: dict[str, tuple[str, ...]] = {
    "humour": ("funny", "not_funny"),
    "sarcasm": ("sarcastic", "non_sarcastic"),
    "offensive": ("offensive", "non_offensive"),
    "motivational": ("motivational", "non_motivational"),
    "sentiment": ("positive", "negative", "neutral"),
}

_MEMOTION_COLUMNS = {
    "humour": "humour",
    "sarcasm": "sarcasm",
    "offensive": "offensive",
    "motivational": "motivational",
    "sentiment": "overall_sentiment",
}

_MEMOTION_REQUIRED = ("image_name", "text_corrected") + tuple(_MEMOTION_COLUMNS.values())
_REDDIT_REQUIRED = ("image", "title")


@dataclass(frozen=True)
class AttributeLabels:
    humour: str = UNKNOWN
    sarcasm: str = UNKNOWN
    offensive: str = UNKNOWN
    motivational: str = UNKNOWN
    sentiment: str = UNKNOWN

    def get(self, attribute: str) -> str:
        if attribute not in ATTRIBUTES:
            raise SchemaError(f"unknown attribute {attribute!r}; expected one of {sorted(ATTRIBUTES)}")
        return getattr(self, attribute)


@dataclass(frozen=True)
class MemeRecord:
    meme_id: str
    text: str
    attributes: AttributeLabels

    @property
    def text_present(self) -> bool:
        return bool(self.text.strip())


@dataclass
class Corpus:
    records: list[MemeRecord]
    source_label: str = ""
    warnings: list[str] = field(default_factory=list, compare=False)

    def __post_init__(self):
        index: dict[str, int] = {}
        for i, rec in enumerate(self.records):
            if not rec.meme_id:
                raise DataError(f"record {i}: empty meme_id")
            if rec.meme_id in index:
                raise DuplicateIdError(f"duplicate meme_id {rec.meme_id!r}")
            index[rec.meme_id] = i
        self._index = index

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.meme_id for r in self.records]

    def row_of(self, meme_id: str) -> int:
        return self._index[meme_id]

    def __contains__(self, meme_id: str) -> bool:
        return meme_id in self._index


def normalize_attribute(attribute: str, raw: str) -> tuple[str, bool]:
    """Map a raw attribute string to its canonical value.

    Returns (value, mapped).  Unmapped strings come back as
    (``unknown``, False) so the caller can record a warning.

    The collapse rule is stem-based: any level containing the positive stem
    without a ``not``/``non`` prefix maps to the positive value, explicit
    negated forms map to the negative value, anything else is unmapped.
    """
    token = raw.strip().lower().replace(" ", "_").replace("-", "_")
    if token in ("", UNKNOWN):
        return UNKNOWN, True
    values = ATTRIBUTES[attribute]
    if token in values:
        return token, True
    negated = token.startswith("not_") or token.startswith("non_")
    if attribute == "sentiment":
        if "positive" in token:
            return "positive", True
        if "negative" in token:
            return "negative", True
        return UNKNOWN, False
    positive, negative = values
    stem = {"humour": "funny", "sarcasm": "sarcastic", "offensive": "offensive",
            "motivational": "motivational"}[attribute]
    if stem in token:
        return (negative if negated else positive), True
    return UNKNOWN, False


def load_corpus(path, schema: str) -> Corpus:
    """Load a CSV file into a Corpus, one record per data row, in file order."""
    if schema not in ("memotion", "reddit"):
        raise SchemaError(f"unknown schema {schema!r}; expected 'memotion' or 'reddit'")
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        required = _MEMOTION_REQUIRED if schema == "memotion" else _REDDIT_REQUIRED
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: header is missing required column {col!r}")
        records: list[MemeRecord] = []
        warnings: list[str] = []
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            if schema == "memotion":
                meme_id = (row.get("image_name") or "").strip()
                text = row.get("text_corrected") or ""
                labels = {}
                for attr, col in _MEMOTION_COLUMNS.items():
                    value, mapped = normalize_attribute(attr, row.get(col) or "")
                    labels[attr] = value
                    if not mapped:
                        warnings.append(
                            f"line {lineno}: unmapped {attr} value {row.get(col)!r} -> unknown"
                        )
                attributes = AttributeLabels(**labels)
            else:
                meme_id = (row.get("image") or "").strip()
                text = row.get("title") or ""
                attributes = AttributeLabels()
            if not meme_id:
                raise SchemaError(f"{path}: line {lineno}: empty meme id")
            if meme_id in seen:
                raise DuplicateIdError(f"{path}: duplicate meme_id {meme_id!r} at line {lineno}")
            seen.add(meme_id)
            records.append(MemeRecord(meme_id=meme_id, text=text, attributes=attributes))
    return Corpus(records=records, source_label=str(path), warnings=warnings)


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus back to memotion-layout CSV with canonical attribute values."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(_MEMOTION_REQUIRED)
        for rec in corpus.records:
            a = rec.attributes
            writer.writerow([rec.meme_id, rec.text, a.humour, a.sarcasm,
                             a.offensive, a.motivational, a.sentiment])


@dataclass
class DistributionTable:
    """Counts and percents per label for one attribute."""

    attribute: str
    rows: list[tuple[str, int, float]]  # (label, count, percent)

    @property
    def total(self) -> int:
        return sum(count for _, count, _ in self.rows)

    def to_json(self) -> str:
        return json.dumps(
            {
                "attribute": self.attribute,
                "total": self.total,
                "rows": [
                    {"label": label, "count": count, "percent": percent}
                    for label, count, percent in self.rows
                ],
            },
            indent=2,
        )

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label", "count", "percent"])
        for label, count, percent in self.rows:
            writer.writerow([label, count, f"{percent:.2f}"])
        return buf.getvalue()


def attribute_distribution(corpus: Corpus, attribute: str) -> DistributionTable:
    """Count label occurrences for one attribute over the whole corpus."""
    if attribute not in ATTRIBUTES:
        raise SchemaError(f"unknown attribute {attribute!r}; expected one of {sorted(ATTRIBUTES)}")
    if len(corpus) == 0:
        raise EmptyInputError("attribute_distribution: empty corpus")
    counts: dict[str, int] = {}
    for rec in corpus.records:
        value = rec.attributes.get(attribute)
        counts[value] = counts.get(value, 0) + 1
    total = len(corpus)
    order = list(ATTRIBUTES[attribute]) + [UNKNOWN]
    rows = [
        (label, counts[label], round(100.0 * counts[label] / total, 2))
        for label in order
        if label in counts
    ]
    return DistributionTable(attribute=attribute, rows=rows)
