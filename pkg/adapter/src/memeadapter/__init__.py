"""Exporter of meme embeddings and emotion sidecars."""

__version__ = "0.1.0"

from .export import AdapterConfig, export_embeddings, export_emotions  # noqa: F401
