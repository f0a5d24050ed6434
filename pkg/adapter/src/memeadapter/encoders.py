"""Joint image-text encoders.

Two backends:

* ``toy`` -- a deterministic desk-scale encoder that puts images and
  captions in one space through a shared color-concept vocabulary: images
  activate concepts by pixel proximity to anchor colors, captions by
  mentioning the color words, and both activations go through the same
  fixed projection.  No checkpoints, no network, reproducible bит for bit.
* ``clip`` -- a pretrained contrastive vision-language checkpoint via
  transformers; used when the checkpoint is cached locally.
"""

from __future__ import annotations

import re

import numpy as np
from PIL import Image

CONCEPTS = (
    ("red", (220, 40, 40)),
    ("orange", (240, 140, 40)),
    ("yellow", (235, 220, 60)),
    ("green", (60, 170, 80)),
    ("cyan", (70, 200, 210)),
    ("blue", (50, 80, 200)),
    ("purple", (140, 70, 180)),
    ("pink", (235, 130, 180)),
    ("brown", (130, 90, 50)),
    ("white", (245, 245, 245)),
    ("gray", (128, 128, 128)),
    ("black", (15, 15, 15)),
)

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


class ToyJointEncoder:
    """Shared-space encoder over a fixed color-concept vocabulary."""

    def __init__(self, dim: int = 64, seed: int = 20240601):
        rng = np.random.default_rng(seed)
        self.dim = dim
        # One fixed projection shared by both modalities defines the space.
        self.projection = rng.standard_normal((len(CONCEPTS), dim))
        self.anchor_rgb = np.array([rgb for _, rgb in CONCEPTS], dtype=np.float64)
        self.words = [word for word, _ in CONCEPTS]

    def _embed_activation(self, activation: np.ndarray) -> np.ndarray:
        vec = activation @ self.projection
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            # No concept signal at all: a fixed off-vocabulary direction.
            vec = self.projection.sum(axis=0)
            norm = np.linalg.norm(vec)
        return (vec / norm).astype(np.float32)

    def encode_image(self, path) -> np.ndarray:
        with Image.open(path) as img:
            small = img.convert("RGB").resize((24, 24), Image.BILINEAR)
        pixels = np.asarray(small, dtype=np.float64).reshape(-1, 3)
        distance = ((pixels[:, None, :] - self.anchor_rgb[None, :, :]) ** 2).sum(axis=2)
        nearest = distance.argmin(axis=1)
        activation = np.bincount(nearest, minlength=len(CONCEPTS)).astype(np.float64)
        return self._embed_activation(activation / len(pixels))

    def encode_text(self, text: str) -> np.ndarray:
        tokens = [t for t in _TOKEN_RE.split(text.lower()) if t]
        activation = np.zeros(len(CONCEPTS), dtype=np.float64)
        for token in tokens:
            if token in self.words:
                activation[self.words.index(token)] += 1.0
        if activation.sum() > 0:
            activation /= activation.sum()
        return self._embed_activation(activation)


class ClipEncoder:
    """Pretrained joint encoder; needs a locally cached checkpoint."""

    def __init__(self, checkpoint: str = "openai/clip-vit-base-patch32"):
        try:
            import torch  # noqa: F401
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise RuntimeError(f"clip backend needs torch+transformers: {exc}")
        try:
            self.model = CLIPModel.from_pretrained(checkpoint)
            self.processor = CLIPProcessor.from_pretrained(checkpoint)
        except Exception as exc:
            raise RuntimeError(f"cannot fetch checkpoint {checkpoint!r}: {exc}")
        self.model.eval()
        self.dim = self.model.config.projection_dim

    def encode_image(self, path) -> np.ndarray:
        import torch

        with Image.open(path) as img:
            inputs = self.processor(images=img.convert("RGB"), return_tensors="pt")
        with torch.no_grad():
            features = self.model.get_image_features(**inputs)
        vec = features[0].numpy().astype(np.float64)
        return (vec / np.linalg.norm(vec)).astype(np.float32)

    def encode_text(self, text: str) -> np.ndarray:
        import torch

        inputs = self.processor(text=[text], return_tensors="pt",
                                padding=True, truncation=True)
        with torch.no_grad():
            features = self.model.get_text_features(**inputs)
        vec = features[0].numpy().astype(np.float64)
        return (vec / np.linalg.norm(vec)).astype(np.float32)


def make_encoder(name: str, dim: int = 64):
    if name == "toy":
        return ToyJointEncoder(dim=dim)
    if name.startswith("clip"):
        _, _, checkpoint = name.partition(":")
        return ClipEncoder(checkpoint or "openai/clip-vit-base-patch32")
    raise ValueError(f"unknown encoder backend {name!r}")
