"""Embedding matrix storage, validation, normalization, and corpus alignment.

Binary layout (little-endian), header 41 bytes then N*D float32 row-major:

    offset  size  field
    0       16    magic "MEMEEMB1" padded with NUL
    16      1     version (1)
    17      1     modality (0=image, 1=text)
    18      1     normalized flag (0/1)
    19      4     u32 N
    23      4     u32 D
    27      8     f64 reserved (0)
    35      4     u32 CRC32 of bytes 0..35
    39      2     u16 reserved (0)

The sibling manifest is UTF-8 text, one meme id per line, LF endings, and
must carry exactly N lines.  A JSONL alternative ({"id":..., "vec":[...]})
is accepted on input for interoperability.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .errors import (
    AlignmentError,
    DataError,
    DegenerateVectorError,
    DimensionError,
    DuplicateIdError,
    FormatError,
    ParseError,
)

MAGIC = b"MEMEEMB1".ljust(16, b"\x00")
VERSION = 1
_MODALITY_CODES = {"image": 0, "text": 1}
_MODALITY_NAMES = {0: "image", 1: "text"}
HEADER_SIZE = 41
NORM_TOLERANCE = 1e-3


@dataclass
class EmbeddingMatrix:
    modality: str
    vectors: np.ndarray  # (N, D) float32
    normalized: bool = False

    def __post_init__(self):
        if self.modality not in _MODALITY_CODES:
            raise DataError(f"modality must be 'image' or 'text', got {self.modality!r}")
        self.vectors = np.asarray(self.vectors, dtype=np.float32)
        if self.vectors.ndim != 2:
            raise DimensionError(f"vectors must be 2-D, got shape {self.vectors.shape}")
        n, d = self.vectors.shape
        if n < 1 or d < 1:
            raise DataError(f"matrix must have N >= 1 and D >= 1, got {n}x{d}")
        bad = np.flatnonzero(~np.isfinite(self.vectors).all(axis=1))
        if bad.size:
            raise DataError(f"non-finite value in row {int(bad[0])}")
        if self.normalized:
            norms = np.linalg.norm(self.vectors.astype(np.float64), axis=1)
            off = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOLERANCE)
            if off.size:
                raise DataError(
                    f"normalized flag set but row {int(off[0])} has norm {norms[off[0]]:.6f}"
                )

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass
class EmbeddingManifest:
    ids: list[str]

    def __post_init__(self):
        seen: set[str] = set()
        for i in self.ids:
            if i in seen:
                raise DuplicateIdError(f"duplicate id {i!r} in manifest")
            seen.add(i)

    def __len__(self) -> int:
        return len(self.ids)


def write_embeddings(matrix: EmbeddingMatrix, manifest: EmbeddingManifest,
                     bin_path, manifest_path) -> None:
    """Write a matrix and its manifest; read_embeddings round-trips bit-exactly."""
    if len(manifest) != matrix.n:
        raise AlignmentError(
            f"manifest has {len(manifest)} ids but matrix has {matrix.n} rows"
        )
    head = MAGIC + struct.pack(
        "<BBBIId",
        VERSION,
        _MODALITY_CODES[matrix.modality],
        1 if matrix.normalized else 0,
        matrix.n,
        matrix.dim,
        0.0,
    )
    head += struct.pack("<IH", zlib.crc32(head) & 0xFFFFFFFF, 0)
    with open(bin_path, "wb") as f:
        f.write(head)
        f.write(np.ascontiguousarray(matrix.vectors, dtype="<f4").tobytes())
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as f:
        for meme_id in manifest.ids:
            f.write(meme_id + "\n")


def read_embeddings(bin_path, manifest_path) -> tuple[EmbeddingMatrix, EmbeddingManifest]:
    """Read a binary embedding file plus manifest, validating every header field."""
    with open(bin_path, "rb") as f:
        blob = f.read()
    if len(blob) < HEADER_SIZE:
        raise FormatError(f"{bin_path}: file shorter than the {HEADER_SIZE}-byte header")
    if blob[:16] != MAGIC:
        raise FormatError(f"{bin_path}: bad magic {blob[:16]!r}")
    version, modality_code, norm_flag, n, d, _reserved = struct.unpack(
        "<BBBIId", blob[16:35]
    )
    crc_stored, _pad = struct.unpack("<IH", blob[35:41])
    if version != VERSION:
        raise FormatError(f"{bin_path}: unsupported version {version}")
    if modality_code not in _MODALITY_NAMES:
        raise FormatError(f"{bin_path}: unknown modality code {modality_code}")
    if zlib.crc32(blob[:35]) & 0xFFFFFFFF != crc_stored:
        raise FormatError(f"{bin_path}: header checksum mismatch")
    expected = HEADER_SIZE + n * d * 4
    if len(blob) != expected:
        raise FormatError(
            f"{bin_path}: payload is {len(blob) - HEADER_SIZE} bytes, expected {n * d * 4}"
        )
    vectors = np.frombuffer(blob, dtype="<f4", offset=HEADER_SIZE).reshape(n, d).copy()
    bad = np.flatnonzero(~np.isfinite(vectors).all(axis=1))
    if bad.size:
        raise DataError(f"{bin_path}: non-finite value in row {int(bad[0])}")
    with open(manifest_path, "r", encoding="utf-8") as f:
        ids = [line.rstrip("\n") for line in f]
    if ids and ids[-1] == "":
        ids.pop()
    if len(ids) != n:
        raise AlignmentError(
            f"{manifest_path}: {len(ids)} manifest lines but header says N={n}"
        )
    matrix = EmbeddingMatrix(
        modality=_MODALITY_NAMES[modality_code],
        vectors=vectors,
        normalized=bool(norm_flag),
    )
    return matrix, EmbeddingManifest(ids=ids)


def read_embeddings_jsonl(path, modality: str) -> tuple[EmbeddingMatrix, EmbeddingManifest]:
    """Read the JSONL interchange form: one {"id":..., "vec":[...]} per line."""
    ids: list[str] = []
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                ids.append(str(obj["id"]))
                rows.append([float(x) for x in obj["vec"]])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}", line_number=lineno)
            if len(rows[-1]) != len(rows[0]):
                raise DimensionError(
                    f"{path}: line {lineno}: vector length {len(rows[-1])} != {len(rows[0])}"
                )
    if not rows:
        raise DataError(f"{path}: no vectors")
    vectors = np.asarray(rows, dtype=np.float32)
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    normalized = bool(np.all(np.abs(norms - 1.0) <= NORM_TOLERANCE))
    matrix = EmbeddingMatrix(modality=modality, vectors=vectors, normalized=normalized)
    return matrix, EmbeddingManifest(ids=ids)


def l2_normalize(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm; rejects all-zero rows."""
    v64 = matrix.vectors.astype(np.float64)
    norms = np.linalg.norm(v64, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateVectorError(f"all-zero vector in row {int(zero[0])}")
    out = (v64 / norms[:, None]).astype(np.float32)
    return EmbeddingMatrix(modality=matrix.modality, vectors=out, normalized=True)


@dataclass
class AlignedStore:
    """Corpus plus both embedding matrices, rows permuted to corpus order."""

    corpus: Corpus
    image: EmbeddingMatrix
    text: EmbeddingMatrix
    excluded: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.image.dim != self.text.dim:
            raise DimensionError(
                f"image D={self.image.dim} but text D={self.text.dim}"
            )
        if not (self.image.n == self.text.n == len(self.corpus)):
            raise AlignmentError(
                f"row counts disagree: corpus={len(self.corpus)}, "
                f"image={self.image.n}, text={self.text.n}"
            )

    def __len__(self) -> int:
        return len(self.corpus)

    @property
    def dim(self) -> int:
        return self.image.dim

    @property
    def ids(self) -> list[str]:
        return self.corpus.ids

    def row_of(self, meme_id: str) -> int:
        return self.corpus.row_of(meme_id)


def align(corpus: Corpus,
          image: tuple[EmbeddingMatrix, EmbeddingManifest],
          text: tuple[EmbeddingMatrix, EmbeddingManifest],
          policy: str = "intersect") -> AlignedStore:
    """Permute both matrices into corpus order.

    ``strict`` requires both manifests to cover exactly the corpus ids;
    ``intersect`` keeps the records present in both manifests and reports
    the excluded ids on the returned store.
    """
    if policy not in ("strict", "intersect"):
        raise AlignmentError(f"unknown policy {policy!r}")
    img_matrix, img_manifest = image
    txt_matrix, txt_manifest = text
    if img_matrix.dim != txt_matrix.dim:
        raise DimensionError(
            f"image D={img_matrix.dim} but text D={txt_matrix.dim}"
        )
    img_rows = {meme_id: i for i, meme_id in enumerate(img_manifest.ids)}
    txt_rows = {meme_id: i for i, meme_id in enumerate(txt_manifest.ids)}
    corpus_ids = set(corpus.ids)

    foreign = sorted((set(img_rows) | set(txt_rows)) - corpus_ids)
    if foreign:
        raise AlignmentError(
            f"manifest ids not in corpus: {', '.join(foreign[:10])}"
            + (" ..." if len(foreign) > 10 else "")
        )
    missing = sorted(corpus_ids - (set(img_rows) & set(txt_rows)))
    if policy == "strict" and missing:
        raise AlignmentError(
            f"strict alignment: missing embeddings for: {', '.join(missing[:10])}"
            + (" ..." if len(missing) > 10 else "")
        )

    kept = [r for r in corpus.records if r.meme_id in img_rows and r.meme_id in txt_rows]
    if not kept:
        raise AlignmentError("no corpus record has both embeddings")
    img_perm = np.array([img_rows[r.meme_id] for r in kept], dtype=np.intp)
    txt_perm = np.array([txt_rows[r.meme_id] for r in kept], dtype=np.intp)
    aligned_corpus = Corpus(records=kept, source_label=corpus.source_label)
    return AlignedStore(
        corpus=aligned_corpus,
        image=EmbeddingMatrix(
            modality="image",
            vectors=img_matrix.vectors[img_perm],
            normalized=img_matrix.normalized,
        ),
        text=EmbeddingMatrix(
            modality="text",
            vectors=txt_matrix.vectors[txt_perm],
            normalized=txt_matrix.normalized,
        ),
        excluded=missing,
    )
