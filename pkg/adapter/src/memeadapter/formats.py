"""Writers for the engine's on-disk interchange formats.

Implemented against the documented contracts (not the engine's code), so
the files double as a conformance check of the format itself:

* embedding binary -- 16-byte magic "MEMEEMB1" (NUL padded), u8 version=1,
  u8 modality (0=image, 1=text), u8 normalized flag, u32 N, u32 D,
  f64 reserved, u32 CRC32 of the preceding bytes, u16 reserved, then
  N*D little-endian float32 row-major.
* manifest -- UTF-8 text, one meme id per line, LF endings.
* emotion sidecar CSV -- meme_id,label,p_sadness,p_joy,p_love,p_anger,
  p_fear,p_surprise with the label equal to the probability argmax.
"""

from __future__ import annotations

import csv
import struct
import zlib

import numpy as np

MAGIC = b"MEMEEMB1".ljust(16, b"\x00")
MODALITY_CODES = {"image": 0, "text": 1}
EMOTIONS = ("sadness", "joy", "love", "anger", "fear", "surprise")


def write_embedding_file(path, vectors: np.ndarray, modality: str,
                         normalized: bool) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2 or vectors.shape[0] < 1 or vectors.shape[1] < 1:
        raise ValueError(f"need a non-empty 2-D matrix, got shape {vectors.shape}")
    if not np.isfinite(vectors).all():
        raise ValueError("refusing to write non-finite values")
    n, d = vectors.shape
    head = MAGIC + struct.pack(
        "<BBBIId", 1, MODALITY_CODES[modality], 1 if normalized else 0, n, d, 0.0
    )
    head += struct.pack("<IH", zlib.crc32(head) & 0xFFFFFFFF, 0)
    with open(path, "wb") as f:
        f.write(head)
        f.write(vectors.tobytes())


def write_manifest(path, ids: list[str]) -> None:
    if len(ids) != len(set(ids)):
        raise ValueError("manifest ids must be unique")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for meme_id in ids:
            f.write(meme_id + "\n")


def write_sidecar(path, rows: list[tuple[str, dict[str, float]]]) -> None:
    """rows: (meme_id, probs) with probs covering all six emotions."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["meme_id", "label", *(f"p_{e}" for e in EMOTIONS)])
        for meme_id, probs in rows:
            total = sum(probs.values())
            if abs(total - 1.0) > 1e-4 or min(probs.values()) < 0:
                raise ValueError(f"{meme_id}: probabilities are not a simplex")
            label = max(EMOTIONS, key=lambda e: (probs[e], -EMOTIONS.index(e)))
            writer.writerow([meme_id, label, *(f"{probs[e]:.6f}" for e in EMOTIONS)])
