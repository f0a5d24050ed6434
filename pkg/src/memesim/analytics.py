"""Emotion-vs-attribute statistics and word-frequency extraction.

The chi-square test of independence is self-contained: the p-value comes
from an in-repo regularized incomplete gamma (series below a+1, continued
fraction above), so results do not depend on any statistics library.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .corpus import ATTRIBUTES, UNKNOWN, Corpus
from .emotion import EMOTIONS, EmotionAnnotations
from .errors import DataError, EmptyInputError, SchemaError

logger = logging.getLogger(__name__)

_GAMMA_TOL = 1e-10
_GAMMA_MAX_ITER = 200


@dataclass
class ContingencyTable:
    row_labels: list[str]
    col_labels: list[str]
    counts: np.ndarray  # (R, C) non-negative integers
    pruned_rows: list[str] = field(default_factory=list)
    pruned_cols: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        r, c = self.counts.shape
        if r != len(self.row_labels) or c != len(self.col_labels):
            raise DataError("label lists do not match the counts shape")
        if (self.counts < 0).any():
            raise DataError("contingency counts must be non-negative")
        if r < 2 or c < 2:
            raise DataError(f"need at least a 2x2 table, got {r}x{c}")
        if (self.counts.sum(axis=1) == 0).any() or (self.counts.sum(axis=0) == 0).any():
            raise DataError("all-zero row or column in contingency table")

    @property
    def grand_total(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> dict:
        return {
            "row_labels": self.row_labels,
            "col_labels": self.col_labels,
            "counts": self.counts.tolist(),
        }


def crosstab(ann: EmotionAnnotations, corpus: Corpus,
             attribute: str) -> ContingencyTable:
    """Joint counts of emotion (rows) against one attribute's levels (columns).

    Memes with an ``unknown`` attribute value or without an emotion label
    are left out; all-zero rows and columns are pruned with a log note.
    """
    if attribute not in ATTRIBUTES:
        raise SchemaError(f"unknown attribute {attribute!r}")
    levels = list(ATTRIBUTES[attribute])
    counts = np.zeros((len(EMOTIONS), len(levels)), dtype=np.int64)
    overlap = 0
    for rec in corpus.records:
        label = ann.label_of(rec.meme_id)
        value = rec.attributes.get(attribute)
        if label is None or value == UNKNOWN:
            continue
        overlap += 1
        counts[EMOTIONS.index(label), levels.index(value)] += 1
    if overlap == 0:
        raise EmptyInputError(
            f"crosstab: no meme has both an emotion label and a known {attribute}"
        )
    keep_rows = counts.sum(axis=1) > 0
    keep_cols = counts.sum(axis=0) > 0
    pruned_rows = [e for e, k in zip(EMOTIONS, keep_rows) if not k]
    pruned_cols = [c for c, k in zip(levels, keep_cols) if not k]
    if pruned_rows or pruned_cols:
        logger.info("crosstab(%s): pruned empty rows=%s cols=%s",
                    attribute, pruned_rows, pruned_cols)
    counts = counts[keep_rows][:, keep_cols]
    return ContingencyTable(
        row_labels=[e for e, k in zip(EMOTIONS, keep_rows) if k],
        col_labels=[c for c, k in zip(levels, keep_cols) if k],
        counts=counts,
        pruned_rows=pruned_rows,
        pruned_cols=pruned_cols,
    )


def _lower_gamma_series(a: float, x: float) -> float:
    # P(a, x) for x < a + 1.
    term = 1.0 / a
    total = term
    for n in range(1, _GAMMA_MAX_ITER + 1):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * _GAMMA_TOL:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"gamma series did not converge for a={a}, x={x}")


def _upper_gamma_cf(a: float, x: float) -> float:
    # Q(a, x) for x >= a + 1, modified Lentz continued fraction.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_TOL:
            return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"gamma continued fraction did not converge for a={a}, x={x}")


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x), the regularized lower incomplete gamma function."""
    if a <= 0:
        raise DataError(f"shape parameter must be positive, got {a}")
    if x < 0:
        raise DataError(f"x must be non-negative, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _lower_gamma_series(a, x)
    return 1.0 - _upper_gamma_cf(a, x)


def chi_square_survival(statistic: float, df: int) -> float:
    """P(X >= statistic) for a chi-square variable with df degrees of freedom."""
    if df < 1:
        raise DataError(f"df must be >= 1, got {df}")
    if statistic < 0:
        raise DataError(f"statistic must be >= 0, got {statistic}")
    if statistic == 0.0:
        return 1.0
    a = df / 2.0
    x = statistic / 2.0
    if x < a + 1.0:
        return min(max(1.0 - _lower_gamma_series(a, x), 0.0), 1.0)
    return min(max(_upper_gamma_cf(a, x), 0.0), 1.0)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    yates: bool = False

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "yates": self.yates,
        }


def chi_square(table: ContingencyTable, yates: bool = False) -> ChiSquareResult:
    """Pearson's chi-square test of independence on a contingency table."""
    obs = table.counts.astype(np.float64)
    grand = obs.sum()
    if grand == 0:
        raise DataError("chi_square: zero grand total")
    row_totals = obs.sum(axis=1)
    col_totals = obs.sum(axis=0)
    expected = np.outer(row_totals, col_totals) / grand
    diff = np.abs(obs - expected)
    if yates:
        diff = np.maximum(diff - 0.5, 0.0)
    statistic = float(((diff * diff) / expected).sum())
    r, c = obs.shape
    df = (r - 1) * (c - 1)
    return ChiSquareResult(
        statistic=statistic,
        df=df,
        p_value=chi_square_survival(statistic, df),
        yates=yates,
    )


_WORD_RE = re.compile(r"[^0-9a-z]+")


def load_stopwords() -> frozenset:
    text = resources.files("memesim.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def word_frequencies(texts: list[str], stopwords: frozenset | set = frozenset(),
                     top_k: int = 50) -> list[tuple[str, int]]:
    """Top-k token counts: lowercase, split on non-alphanumeric, drop
    stopwords and single characters, sort by (count desc, token asc)."""
    if top_k < 1:
        raise DataError(f"top_k must be >= 1, got {top_k}")
    counts: dict[str, int] = {}
    for text in texts:
        for tok in _WORD_RE.split(text.lower()):
            if len(tok) < 2 or tok in stopwords:
                continue
            counts[tok] = counts.get(tok, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k]


def frequencies_to_csv_text(freqs: list[tuple[str, int]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["token", "count"])
    for token, count in freqs:
        writer.writerow([token, count])
    return buf.getvalue()


def chi_square_report(attribute: str, table: ContingencyTable,
                      result: ChiSquareResult) -> str:
    return json.dumps(
        {
            "attribute": attribute,
            "statistic": result.statistic,
            "df": result.df,
            "p_value": result.p_value,
            "yates": result.yates,
            "table": table.to_dict(),
        },
        indent=2,
    )
