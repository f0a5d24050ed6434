"""Command-line interface mirroring AdapterConfig."""

from __future__ import annotations

import argparse
import logging
import sys

from .export import AdapterConfig, export_embeddings, export_emotions


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meme-adapter",
        description="Export meme embeddings and emotion sidecars in the "
                    "engine's interchange formats.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("what", choices=("embeddings", "emotions", "all"),
                        help="which artifacts to export")
    parser.add_argument("--corpus", required=True, help="corpus CSV path")
    parser.add_argument("--images", required=True, help="image directory")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--schema", choices=("memotion", "reddit"),
                        default="memotion")
    parser.add_argument("--encoder", default="toy",
                        help="joint encoder backend: toy or clip[:checkpoint]")
    parser.add_argument("--emotion-model", default="keyword",
                        help="emotion backend: keyword or distilbert[:checkpoint]")
    parser.add_argument("--dim", type=int, default=64,
                        help="embedding dimension (toy backend)")
    parser.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    config = AdapterConfig(
        corpus_path=args.corpus,
        image_dir=args.images,
        output_dir=args.out,
        encoder=args.encoder,
        emotion_model=args.emotion_model,
        schema=args.schema,
        batch_size=args.batch_size,
        dim=args.dim,
    )
    try:
        if args.what in ("embeddings", "all"):
            export_embeddings(config)
        if args.what in ("emotions", "all"):
            export_emotions(config)
    except (ValueError, RuntimeError, OSError) as exc:
        logging.getLogger("meme-adapter").error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
