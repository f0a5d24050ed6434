"""Cosine similarity, four-way cross-modal pair scores, and the edge scan.

Two memes are compared along four directions: image-image, text-text, and
the two image-text crossings.  The four scores are fused by a configurable
aggregation rule and a pair becomes an edge when the combined score reaches
the threshold (0.8 by default).

The full N^2 scan runs over fixed-size row tiles.  Tiles may be scored on
any number of threads; the returned edge list is sorted by (src, dst) and
is bitwise identical for any thread count or tile size.

Edge list files:

* CSV -- ``src_id,dst_id,sim_ii,sim_tt,sim_it,sim_ti,combined`` with scores
  printed at 6 decimal places.
* Binary -- magic "MEMEEDG1" padded to 16 bytes with NUL, u8 version (1),
  u32 edge count, u32 CRC32 of the preceding bytes, u16 reserved, then one
  28-byte record per edge: u32 src row, u32 dst row, f32 ii, tt, it, ti,
  combined (row indices refer to the aligned store order).
"""

from __future__ import annotations

import csv
import logging
import math
import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embeddings import AlignedStore, EmbeddingMatrix
from .errors import (
    ConfigurationError,
    DegenerateVectorError,
    DimensionError,
    FormatError,
)

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.8
DEFAULT_TILE = 256
EDGE_MAGIC = b"MEMEEDG1".ljust(16, b"\x00")
EDGE_VERSION = 1


@dataclass(frozen=True)
class ModalityScores:
    ii: float  # image_a vs image_b
    tt: float  # text_a vs text_b
    it: float  # image_a vs text_b
    ti: float  # text_a vs image_b

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.ii, self.tt, self.it, self.ti)


@dataclass(frozen=True)
class SimilarityEdge:
    src: int
    dst: int
    scores: ModalityScores
    combined: float


@dataclass(frozen=True)
class AggregationMode:
    """Rule fusing the four cross-modal scores into one decision value."""

    mode: str = "mean"
    weights: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.mode not in ("mean", "min", "max", "weighted"):
            raise ConfigurationError(f"unknown aggregation mode {self.mode!r}")
        if self.mode == "weighted":
            w = self.weights
            if w is None or len(w) != 4:
                raise ConfigurationError("weighted mode needs exactly 4 weights")
            if any(x < 0 for x in w):
                raise ConfigurationError("weights must be non-negative")
            if abs(sum(w) - 1.0) > 1e-9:
                raise ConfigurationError(f"weights must sum to 1, got {sum(w)}")
        elif self.weights is not None:
            raise ConfigurationError(f"mode {self.mode!r} takes no weights")

    @classmethod
    def parse(cls, spec: str) -> "AggregationMode":
        """Parse 'mean', 'min', 'max', or 'weighted=w,w,w,w'."""
        spec = spec.strip()
        if spec.startswith("weighted"):
            _, _, tail = spec.partition("=")
            try:
                weights = tuple(float(x) for x in tail.split(","))
            except ValueError:
                raise ConfigurationError(f"cannot parse weights in {spec!r}")
            return cls(mode="weighted", weights=weights)  # type: ignore[arg-type]
        return cls(mode=spec)


def cosine(a, b) -> float:
    """Cosine similarity of two vectors, accumulated in float64."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionError(f"vector lengths differ: {a.size} vs {b.size}")
    if a.size < 1:
        raise DimensionError("vectors must have at least one component")
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine of an all-zero vector is undefined")
    return float(np.dot(a, b)) / (na * nb)


def pair_scores(store: AlignedStore, i: int, j: int) -> ModalityScores:
    """The four cross-modal cosine scores for memes at rows i and j."""
    if i == j:
        raise ConfigurationError("pair_scores requires two distinct rows")
    n = len(store)
    if not (0 <= i < n and 0 <= j < n):
        raise ConfigurationError(f"row out of range: {i}, {j} with n={n}")
    img_i = store.image.vectors[i]
    img_j = store.image.vectors[j]
    txt_i = store.text.vectors[i]
    txt_j = store.text.vectors[j]
    return ModalityScores(
        ii=cosine(img_i, img_j),
        tt=cosine(txt_i, txt_j),
        it=cosine(img_i, txt_j),
        ti=cosine(txt_i, img_j),
    )


def aggregate(scores: ModalityScores, mode: AggregationMode) -> float:
    """Fuse four modality scores into the combined decision value."""
    return float(_combine(*(np.float64(s) for s in scores.as_tuple()), mode=mode))


def _combine(ii, tt, it, ti, mode: AggregationMode):
    # Fixed evaluation order keeps results bit-stable across runs.
    if mode.mode == "mean":
        return ((ii + tt) + (it + ti)) * 0.25
    if mode.mode == "min":
        return np.minimum(np.minimum(ii, tt), np.minimum(it, ti))
    if mode.mode == "max":
        return np.maximum(np.maximum(ii, tt), np.maximum(it, ti))
    w = mode.weights
    return ((w[0] * ii + w[1] * tt) + (w[2] * it + w[3] * ti))


def _unit_rows(matrix: EmbeddingMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Float64 copy with exactly unit rows; returns (rows, zero_row_mask).

    Rows are re-normalized in float64 even when the matrix is flagged
    normalized: float32 rows carry ~1e-7 norm error, and dividing it out
    keeps the kernel's dot products equal to true cosines at ~1e-15.
    """
    v = matrix.vectors.astype(np.float64)
    norms = np.linalg.norm(v, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    return v / safe[:, None], zero


def pairwise_edges(store: AlignedStore,
                   threshold: float = DEFAULT_THRESHOLD,
                   mode: AggregationMode = AggregationMode("mean"),
                   threads: int | None = None,
                   tile_size: int = DEFAULT_TILE) -> list[SimilarityEdge]:
    """Scan all meme pairs and keep those whose combined score reaches the threshold.

    Pairs touching an all-zero vector are skipped (and logged with their
    meme ids); the scan itself always completes.
    """
    if not (-1.0 <= threshold <= 1.0):
        raise ConfigurationError(f"threshold must be in [-1, 1], got {threshold}")
    if tile_size < 1:
        raise ConfigurationError(f"tile_size must be >= 1, got {tile_size}")
    n = len(store)
    img, img_zero = _unit_rows(store.image)
    txt, txt_zero = _unit_rows(store.text)
    skip = img_zero | txt_zero
    if skip.any():
        bad = [store.ids[i] for i in np.flatnonzero(skip)]
        logger.warning(
            "skipping %d meme(s) with an all-zero vector: %s",
            len(bad), ", ".join(bad[:20]) + (" ..." if len(bad) > 20 else ""),
        )

    from . import _kernels

    tiles = [(s, min(s + tile_size, n)) for s in range(0, n, tile_size)]
    tasks = [
        (ta, tb)
        for ai, ta in enumerate(tiles)
        for tb in tiles[ai:]
    ]

    def run_block(task):
        (i0, i1), (j0, j1) = task
        bi, bj = i1 - i0, j1 - j0
        ii = np.empty((bi, bj), dtype=np.float64)
        tt = np.empty((bi, bj), dtype=np.float64)
        it = np.empty((bi, bj), dtype=np.float64)
        ti = np.empty((bi, bj), dtype=np.float64)
        _kernels.block_scores(img, txt, i0, i1, j0, j1, ii, tt, it, ti)
        combined = _combine(ii, tt, it, ti, mode)
        rows = np.arange(i0, i1)[:, None]
        cols = np.arange(j0, j1)[None, :]
        keep = (rows < cols) & (combined >= threshold)
        keep &= ~skip[rows] & ~skip[cols]
        ai, bj_idx = np.nonzero(keep)
        return (
            rows.ravel()[ai], cols.ravel()[bj_idx],
            ii[ai, bj_idx], tt[ai, bj_idx], it[ai, bj_idx], ti[ai, bj_idx],
            combined[ai, bj_idx],
        )

    workers = threads if threads and threads > 0 else None
    if workers == 1 or len(tasks) == 1:
        results = [run_block(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, tasks))

    if not results:
        return []
    src = np.concatenate([r[0] for r in results])
    dst = np.concatenate([r[1] for r in results])
    cols = [np.concatenate([r[k] for r in results]) for k in range(2, 7)]
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    cols = [c[order] for c in cols]
    return [
        SimilarityEdge(
            src=int(src[k]),
            dst=int(dst[k]),
            scores=ModalityScores(
                ii=float(cols[0][k]), tt=float(cols[1][k]),
                it=float(cols[2][k]), ti=float(cols[3][k]),
            ),
            combined=float(cols[4][k]),
        )
        for k in range(src.size)
    ]


def contrastive_loss(img: EmbeddingMatrix, txt: EmbeddingMatrix,
                     temperature: float) -> tuple[float, list[float]]:
    """Softmax cross-entropy over image-to-text similarity logits.

    For each image row the matched text is the same row; the per-row loss is
    the negative log-probability of that match under a softmax across all
    text rows at the given temperature.  Stabilized with log-sum-exp.
    """
    if temperature <= 0:
        raise ConfigurationError(f"temperature must be > 0, got {temperature}")
    if img.n != txt.n:
        raise DimensionError(f"row counts differ: {img.n} vs {txt.n}")
    if img.dim != txt.dim:
        raise DimensionError(f"dims differ: {img.dim} vs {txt.dim}")
    a, a_zero = _unit_rows(img)
    b, b_zero = _unit_rows(txt)
    if a_zero.any() or b_zero.any():
        raise DegenerateVectorError("contrastive loss needs non-zero rows")
    logits = (a @ b.T) / temperature
    m = logits.max(axis=1)
    lse = m + np.log(np.exp(logits - m[:, None]).sum(axis=1))
    per_pair = lse - np.diag(logits)
    return float(per_pair.sum()), [float(x) for x in per_pair]


def write_edges_csv(edges: list[SimilarityEdge], ids: list[str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["src_id", "dst_id", "sim_ii", "sim_tt", "sim_it", "sim_ti", "combined"])
        for e in edges:
            writer.writerow([
                ids[e.src], ids[e.dst],
                f"{e.scores.ii:.6f}", f"{e.scores.tt:.6f}",
                f"{e.scores.it:.6f}", f"{e.scores.ti:.6f}",
                f"{e.combined:.6f}",
            ])


def write_edges_binary(edges: list[SimilarityEdge], path) -> None:
    head = EDGE_MAGIC + struct.pack("<BI", EDGE_VERSION, len(edges))
    head += struct.pack("<IH", zlib.crc32(head) & 0xFFFFFFFF, 0)
    with open(path, "wb") as f:
        f.write(head)
        for e in edges:
            f.write(struct.pack(
                "<IIfffff", e.src, e.dst,
                e.scores.ii, e.scores.tt, e.scores.it, e.scores.ti, e.combined,
            ))


def read_edges_binary(path) -> list[SimilarityEdge]:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 27 or blob[:16] != EDGE_MAGIC:
        raise FormatError(f"{path}: not an edge file")
    version, count = struct.unpack("<BI", blob[16:21])
    crc_stored, _ = struct.unpack("<IH", blob[21:27])
    if version != EDGE_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if zlib.crc32(blob[:21]) & 0xFFFFFFFF != crc_stored:
        raise FormatError(f"{path}: header checksum mismatch")
    if len(blob) != 27 + 28 * count:
        raise FormatError(f"{path}: truncated edge payload")
    edges = []
    for k in range(count):
        src, dst, ii, tt, it, ti, comb = struct.unpack_from("<IIfffff", blob, 27 + 28 * k)
        edges.append(SimilarityEdge(
            src=src, dst=dst,
            scores=ModalityScores(ii=ii, tt=tt, it=it, ti=ti),
            combined=comb,
        ))
    return edges
