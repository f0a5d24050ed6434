"""Batch export of embeddings and emotion sidecars for a meme corpus."""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass

import numpy as np

from .emotions import make_classifier
from .encoders import make_encoder
from .formats import write_embedding_file, write_manifest, write_sidecar

logger = logging.getLogger(__name__)


@dataclass
class AdapterConfig:
    corpus_path: str
    image_dir: str
    output_dir: str
    encoder: str = "toy"           # "toy" or "clip[:checkpoint]"
    emotion_model: str = "keyword"  # "keyword" or "distilbert[:checkpoint]"
    schema: str = "memotion"
    batch_size: int = 32
    dim: int = 64                  # toy backend only; clip fixes its own dim

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.schema not in ("memotion", "reddit"):
            raise ValueError(f"unknown schema {self.schema!r}")


def read_corpus_rows(path, schema: str) -> list[tuple[str, str]]:
    """(meme_id, text) per data row, in file order."""
    id_col, text_col = (("image_name", "text_corrected") if schema == "memotion"
                        else ("image", "title"))
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in (id_col, text_col):
            if col not in header:
                raise ValueError(f"{path}: missing column {col!r}")
        for row in reader:
            meme_id = (row.get(id_col) or "").strip()
            if meme_id:
                rows.append((meme_id, row.get(text_col) or ""))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def export_embeddings(config: AdapterConfig) -> dict:
    """Write image/text embedding binaries plus manifests.

    Undecodable or missing images are skipped and listed in
    ``exclusions.txt``; the manifests carry only exported rows.
    """
    rows = read_corpus_rows(config.corpus_path, config.schema)
    encoder = make_encoder(config.encoder, dim=config.dim)
    os.makedirs(config.output_dir, exist_ok=True)

    ids: list[str] = []
    image_rows: list[np.ndarray] = []
    text_rows: list[np.ndarray] = []
    excluded: list[str] = []
    for meme_id, text in rows:
        image_path = os.path.join(config.image_dir, meme_id)
        try:
            image_vec = encoder.encode_image(image_path)
        except (OSError, ValueError) as exc:
            logger.warning("skipping %s: %s", meme_id, exc)
            excluded.append(meme_id)
            continue
        ids.append(meme_id)
        image_rows.append(image_vec)
        text_rows.append(encoder.encode_text(text))

    if not ids:
        raise ValueError("no exportable rows: every image failed to decode")

    out = config.output_dir
    write_embedding_file(os.path.join(out, "img.bin"),
                         np.stack(image_rows), "image", normalized=True)
    write_manifest(os.path.join(out, "img.ids"), ids)
    write_embedding_file(os.path.join(out, "txt.bin"),
                         np.stack(text_rows), "text", normalized=True)
    write_manifest(os.path.join(out, "txt.ids"), ids)
    with open(os.path.join(out, "exclusions.txt"), "w", encoding="utf-8") as f:
        for meme_id in excluded:
            f.write(meme_id + "\n")
    logger.info("exported %d rows (%d excluded) at D=%d",
                len(ids), len(excluded), image_rows[0].shape[0])
    return {"exported": len(ids), "excluded": excluded,
            "dim": int(image_rows[0].shape[0])}


def export_emotions(config: AdapterConfig) -> dict:
    """Write the emotion sidecar CSV for every text-bearing meme."""
    rows = read_corpus_rows(config.corpus_path, config.schema)
    classifier = make_classifier(config.emotion_model)
    os.makedirs(config.output_dir, exist_ok=True)
    sidecar_rows = []
    for meme_id, text in rows:
        if not text.strip():
            continue  # memes without text stay out of emotion analytics
        sidecar_rows.append((meme_id, classifier.classify(text)))
    if not sidecar_rows:
        raise ValueError("no text-bearing memes to classify")
    write_sidecar(os.path.join(config.output_dir, "emotions.csv"), sidecar_rows)
    logger.info("classified %d text-bearing memes", len(sidecar_rows))
    return {"classified": len(sidecar_rows)}
