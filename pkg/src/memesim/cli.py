"""Command-line entry point for the meme similarity and emotion pipeline.

Subcommands mirror the pipeline stages: ``ingest`` validates a corpus,
``similarity`` scans pair scores into an edge list, ``group`` builds
connected components, ``emotions`` attaches labels, ``analyze`` produces
distribution/chi-square/word-frequency reports, ``evaluate`` scores survey
responses, ``serve`` starts the HTTP API, and ``pipeline`` chains
ingest -> similarity -> group -> emotions -> analyze in one run.

Every run writes its artifacts into an output directory along with
``run_manifest.json`` (flags, input hashes, timestamp).  Artifacts
themselves carry no timestamps, so reruns are byte-identical.  The
``MEMESIM_OUT`` environment variable overrides ``--out``.  Logs go to
stderr; pass ``--stdout`` to also print the primary artifact on stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

from . import __version__
from . import analytics, emotion, evaluation, grouping, similarity
from .corpus import ATTRIBUTES, Corpus, attribute_distribution, load_corpus
from .embeddings import align, read_embeddings, read_embeddings_jsonl
from .errors import (
    AlignmentError,
    ConfigurationError,
    ConflictError,
    ConsistencyError,
    DataError,
    DegenerateVectorError,
    DimensionError,
    DuplicateIdError,
    EmptyInputError,
    FormatError,
    LabelError,
    MemesimError,
    ParseError,
    PartitionError,
    SchemaError,
    UnknownIdError,
)

logger = logging.getLogger("memesim")

EXIT_CODES: list[tuple[type, int]] = [
    (ConfigurationError, 2),
    (SchemaError, 3),
    (FormatError, 4),
    ((DataError, LabelError, ConsistencyError, ParseError), 5),
    ((AlignmentError, DimensionError), 6),
    ((DuplicateIdError, ConflictError), 7),
    ((EmptyInputError, DegenerateVectorError, PartitionError, UnknownIdError), 8),
]


def _exit_code(exc: Exception) -> int:
    for klass, code in EXIT_CODES:
        if isinstance(exc, klass):
            return code
    if isinstance(exc, OSError):
        return 9
    return 1


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: str, args: argparse.Namespace, inputs: list[str]) -> None:
    manifest = {
        "tool": "memesim",
        "version": __version__,
        "subcommand": args.subcommand,
        "flags": {
            k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "subcommand") and v is not None
        },
        "inputs": {p: _sha256(p) for p in inputs if p and os.path.isfile(p)},
        "created_at": int(time.time()),
    }
    with open(os.path.join(out_dir, "run_manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, default=str)
        f.write("\n")


def _out_dir(args: argparse.Namespace) -> str:
    out = os.environ.get("MEMESIM_OUT") or args.out
    os.makedirs(out, exist_ok=True)
    return out


def _write(out_dir: str, name: str, text: str) -> str:
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def _load_embeddings_arg(path: str, modality: str, manifest_arg: str | None):
    if path.endswith(".jsonl"):
        return read_embeddings_jsonl(path, modality)
    manifest_path = manifest_arg or os.path.splitext(path)[0] + ".ids"
    return read_embeddings(path, manifest_path)


def _build_store(args: argparse.Namespace):
    corpus = load_corpus(args.corpus, schema=args.schema)
    img = _load_embeddings_arg(args.img_emb, "image", args.img_manifest)
    txt = _load_embeddings_arg(args.txt_emb, "text", args.txt_manifest)
    store = align(corpus, img, txt, policy=args.align_policy)
    if store.excluded:
        logger.warning("excluded %d meme(s) lacking embeddings", len(store.excluded))
    return store


def _annotations_for(args: argparse.Namespace, corpus: Corpus):
    spec = args.emotions
    if spec == "lexicon":
        return emotion.annotate(corpus)
    if spec.startswith("sidecar:"):
        sidecar = emotion.load_emotion_sidecar(spec.split(":", 1)[1])
        return emotion.annotate(corpus, sidecar=sidecar)
    raise ConfigurationError(
        f"--emotions must be 'lexicon' or 'sidecar:PATH', got {spec!r}"
    )


# ---------------------------------------------------------------- subcommands


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    corpus = load_corpus(args.corpus, schema=args.schema)
    report = {
        "source": args.corpus,
        "schema": args.schema,
        "records": len(corpus),
        "text_present": sum(1 for r in corpus.records if r.text_present),
        "warnings": corpus.warnings,
    }
    for attr in ATTRIBUTES:
        table = attribute_distribution(corpus, attr)
        _write(out, f"attribute_distribution_{attr}.csv", table.to_csv_text())
        report[f"distribution_{attr}"] = {
            label: {"count": c, "percent": p} for label, c, p in table.rows
        }
    text = json.dumps(report, indent=2) + "\n"
    _write(out, "corpus_report.json", text)
    _write_manifest(out, args, [args.corpus])
    if args.stdout:
        sys.stdout.write(text)
    logger.info("ingested %d records (%d with text), %d warnings",
                report["records"], report["text_present"], len(corpus.warnings))
    return 0


def _similarity_stage(args, out: str):
    store = _build_store(args)
    mode = similarity.AggregationMode.parse(args.agg)
    edges = similarity.pairwise_edges(
        store, threshold=args.threshold, mode=mode,
        threads=args.threads, tile_size=args.tile_size,
    )
    similarity.write_edges_csv(edges, store.ids, os.path.join(out, "edges.csv"))
    similarity.write_edges_binary(edges, os.path.join(out, "edges.bin"))
    _write(out, "aligned_ids.txt", "".join(i + "\n" for i in store.ids))
    if store.excluded:
        _write(out, "alignment_exclusions.txt",
               "".join(i + "\n" for i in store.excluded))
    logger.info("similarity: %d edges at threshold %s (%s)",
                len(edges), args.threshold, args.agg)
    return store, edges


def cmd_similarity(args) -> int:
    out = _out_dir(args)
    _similarity_stage(args, out)
    _write_manifest(out, args, [args.corpus, args.img_emb, args.txt_emb])
    if args.stdout:
        with open(os.path.join(out, "edges.csv"), "r", encoding="utf-8") as f:
            sys.stdout.write(f.read())
    return 0


def _group_stage(out: str, n: int, edges, ids, clique_check: bool):
    index_groups = grouping.group_edges(n, edges)
    id_groups = grouping.group_edges(n, edges, ids=ids)
    _write(out, "groups.json", grouping.groups_to_json(id_groups) + "\n")
    grouping.write_groups_csv(id_groups, os.path.join(out, "groups.csv"))
    stats = grouping.group_stats(id_groups)
    _write(out, "group_stats.json", json.dumps(stats.to_dict(), indent=2) + "\n")
    if clique_check:
        fractions = grouping.clique_fractions(index_groups, edges, n)
        _write(out, "clique_report.json", json.dumps(
            {str(k): v for k, v in sorted(fractions.items())}, indent=2) + "\n")
    logger.info("grouping: %d groups (%d singletons, largest %d)",
                stats.count, stats.singletons, stats.largest)
    return id_groups


def cmd_group(args) -> int:
    out = _out_dir(args)
    with open(args.ids, "r", encoding="utf-8") as f:
        ids = [line.rstrip("\n") for line in f if line.strip()]
    edges = similarity.read_edges_binary(args.edges)
    groups = _group_stage(out, len(ids), edges, ids, args.clique_check)
    _write_manifest(out, args, [args.edges, args.ids])
    if args.stdout:
        sys.stdout.write(grouping.groups_to_json(groups) + "\n")
    return 0


def cmd_emotions(args) -> int:
    out = _out_dir(args)
    corpus = load_corpus(args.corpus, schema=args.schema)
    ann = _annotations_for(args, corpus)
    emotion.write_sidecar_csv(ann, os.path.join(out, "emotions.csv"))
    coverage = {
        "annotated": len(ann),
        "text_present": sum(1 for r in corpus.records if r.text_present),
        "records": len(corpus),
    }
    _write(out, "emotion_coverage.json", json.dumps(coverage, indent=2) + "\n")
    _write_manifest(out, args, [args.corpus])
    if args.stdout:
        with open(os.path.join(out, "emotions.csv"), "r", encoding="utf-8") as f:
            sys.stdout.write(f.read())
    logger.info("emotions: annotated %d of %d text-bearing memes",
                coverage["annotated"], coverage["text_present"])
    return 0


def _analyze_stage(args, out: str, corpus: Corpus, ann) -> dict:
    distribution = emotion.emotion_distribution(ann)
    _write(out, "emotion_distribution.csv", distribution.to_csv_text())
    _write(out, "emotion_distribution.json", distribution.to_json() + "\n")

    attributes = list(ATTRIBUTES) if args.attribute == "all" else [args.attribute]
    chi_results = {}
    for attr in attributes:
        try:
            table = analytics.crosstab(ann, corpus, attr)
            result = analytics.chi_square(table, yates=args.yates)
        except (EmptyInputError, DataError) as exc:
            logger.warning("analyze: skipping %s crosstab: %s", attr, exc)
            continue
        _write(out, f"chi_square_{attr}.json",
               analytics.chi_square_report(attr, table, result) + "\n")
        chi_results[attr] = result.p_value

    stopwords = analytics.load_stopwords()
    if args.stopwords:
        with open(args.stopwords, "r", encoding="utf-8") as f:
            stopwords = frozenset(w.strip() for w in f if w.strip())
    texts = [r.text for r in corpus.records if r.text_present]
    freqs = analytics.word_frequencies(texts, stopwords=stopwords, top_k=args.top_k)
    _write(out, "word_frequencies.csv", analytics.frequencies_to_csv_text(freqs))
    _write(out, "word_frequencies.json",
           json.dumps([{"token": t, "count": c} for t, c in freqs], indent=2) + "\n")
    logger.info("analyze: chi-square p-values: %s",
                {k: round(v, 5) for k, v in chi_results.items()})
    return {"chi_square_p_values": chi_results,
            "emotion_total": distribution.total}


def cmd_analyze(args) -> int:
    out = _out_dir(args)
    corpus = load_corpus(args.corpus, schema=args.schema)
    ann = _annotations_for(args, corpus)
    summary = _analyze_stage(args, out, corpus, ann)
    _write_manifest(out, args, [args.corpus])
    if args.stdout:
        sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_evaluate(args) -> int:
    out = _out_dir(args)
    store = evaluation.load_responses(args.responses)
    report = evaluation.agreement_report(store)
    _write(out, "agreement.json", json.dumps(report.to_dict(), indent=2) + "\n")
    lines = ["group_id,rate"]
    lines += [f"{gid},{rate:.2f}" for gid, rate in sorted(report.per_group.items())]
    _write(out, "agreement.csv", "\n".join(lines) + "\n")

    if args.groups and args.corpus:
        with open(args.groups, "r", encoding="utf-8") as f:
            groups = grouping.groups_from_json(f.read())
        corpus = load_corpus(args.corpus, schema=args.schema)
        ann = _annotations_for(args, corpus)
        dominants = emotion.group_emotions(groups, ann)
        try:
            ea = evaluation.emotion_agreement(store, dominants)
            _write(out, "emotion_agreement.json",
                   json.dumps(ea.to_dict(), indent=2) + "\n")
            logger.info("emotion agreement: %.2f%% over %d responses",
                        ea.accuracy, ea.total)
        except EmptyInputError:
            logger.info("no emotion-bearing responses to score")

    _write_manifest(out, args, [args.responses])
    if args.stdout:
        sys.stdout.write(json.dumps(report.to_dict(), indent=2) + "\n")
    print(f"average agreement: {report.average:.2f} over {report.n_groups} groups",
          file=sys.stderr)
    logger.info("evaluate: average %.2f over %d groups", report.average, report.n_groups)
    return 0


def cmd_pipeline(args) -> int:
    out = _out_dir(args)
    corpus = load_corpus(args.corpus, schema=args.schema)
    report = {
        "records": len(corpus),
        "text_present": sum(1 for r in corpus.records if r.text_present),
        "warnings": corpus.warnings,
    }
    _write(out, "corpus_report.json", json.dumps(report, indent=2) + "\n")

    store, edges = _similarity_stage(args, out)
    groups = _group_stage(out, len(store), edges, store.ids, args.clique_check)

    ann = _annotations_for(args, store.corpus)
    emotion.write_sidecar_csv(ann, os.path.join(out, "emotions.csv"))
    dominants = emotion.group_emotions(groups, ann)
    _write(out, "group_emotions.json", json.dumps(
        [{"group_id": gid, "dominant": ge.dominant, "histogram": ge.histogram}
         for gid, ge in sorted(dominants.items())], indent=2) + "\n")

    _analyze_stage(args, out, store.corpus, ann)
    _write_manifest(out, args, [args.corpus, args.img_emb, args.txt_emb])
    logger.info("pipeline complete: %s", out)
    return 0


def cmd_explain_pair(args) -> int:
    store = _build_store(args)
    for meme_id in (args.id_a, args.id_b):
        if meme_id not in store.corpus:
            raise UnknownIdError(f"unknown meme id {meme_id!r}")
    i = store.row_of(args.id_a)
    j = store.row_of(args.id_b)
    scores = similarity.pair_scores(store, i, j)
    mode = similarity.AggregationMode.parse(args.agg)
    combined = similarity.aggregate(scores, mode)
    verdict = "similar" if combined >= args.threshold else "not similar"
    out = {
        "id_a": args.id_a,
        "id_b": args.id_b,
        "scores": {
            "image_image": scores.ii,
            "text_text": scores.tt,
            "image_a_text_b": scores.it,
            "text_a_image_b": scores.ti,
        },
        "aggregation": args.agg,
        "combined": combined,
        "threshold": args.threshold,
        "verdict": verdict,
    }
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


def cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig(
        corpus_path=args.corpus,
        schema=args.schema,
        groups_path=args.groups,
        responses_path=args.responses,
        image_dir=args.images,
        annotations_path=args.annotations,
        ui_dir=args.ui_dir,
        host=args.host,
        port=args.port,
        read_only=args.read_only,
    )
    serve(config)
    return 0


# ------------------------------------------------------------------- parsing


def _add_corpus_flags(p):
    p.add_argument("--corpus", required=True, help="corpus CSV path")
    p.add_argument("--schema", choices=("memotion", "reddit"), default="memotion",
                   help="corpus header layout")


def _add_embedding_flags(p):
    p.add_argument("--img-emb", required=True,
                   help="image embedding file (.bin with sibling .ids manifest, or .jsonl)")
    p.add_argument("--txt-emb", required=True, help="text embedding file")
    p.add_argument("--img-manifest", default=None,
                   help="image manifest path (default: embedding path with .ids)")
    p.add_argument("--txt-manifest", default=None, help="text manifest path")
    p.add_argument("--align-policy", choices=("strict", "intersect"),
                   default="intersect", help="how to align corpus and manifests")


def _add_similarity_flags(p):
    p.add_argument("--threshold", type=float, default=similarity.DEFAULT_THRESHOLD,
                   help="combined-score threshold for an edge")
    p.add_argument("--agg", default="mean",
                   help="aggregation: mean, min, max, or weighted=w,w,w,w")
    p.add_argument("--threads", type=int, default=os.cpu_count(),
                   help="worker threads for the pair scan")
    p.add_argument("--tile-size", type=int, default=similarity.DEFAULT_TILE,
                   help="rows per scan tile")


def _add_common_flags(p):
    p.add_argument("--out", default="memesim_out",
                   help="output directory (MEMESIM_OUT env var overrides)")
    p.add_argument("--stdout", action="store_true",
                   help="also print the primary artifact on stdout")


def _add_emotion_flags(p):
    p.add_argument("--emotions", default="lexicon",
                   help="emotion source: 'lexicon' or 'sidecar:PATH'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memesim",
        description="Group memes by cross-modal embedding similarity and "
                    "analyze the emotions they evoke.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"memesim {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="load and validate a corpus CSV",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_corpus_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("similarity", help="compute the thresholded edge list",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_corpus_flags(p)
    _add_embedding_flags(p)
    _add_similarity_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("group", help="connected components from an edge list",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--edges", required=True, help="edges.bin from the similarity stage")
    p.add_argument("--ids", required=True, help="aligned_ids.txt from the similarity stage")
    p.add_argument("--clique-check", action="store_true",
                   help="report per-group fraction of internal pairs above threshold")
    _add_common_flags(p)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("emotions", help="annotate memes with emotions",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_corpus_flags(p)
    _add_emotion_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_emotions)

    p = sub.add_parser("analyze", help="distributions, chi-square, word frequencies",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_corpus_flags(p)
    _add_emotion_flags(p)
    p.add_argument("--attribute", default="all",
                   choices=("all",) + tuple(ATTRIBUTES),
                   help="attribute for the emotion crosstab")
    p.add_argument("--yates", action="store_true",
                   help="apply the Yates continuity correction")
    p.add_argument("--top-k", type=int, default=50, help="word-frequency list size")
    p.add_argument("--stopwords", default=None,
                   help="custom stopword file (one word per line)")
    _add_common_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("evaluate", help="agreement metrics from survey responses",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--responses", required=True, help="responses JSONL path")
    p.add_argument("--groups", default=None,
                   help="groups.json (enables emotion agreement)")
    p.add_argument("--corpus", default=None, help="corpus CSV (for emotion agreement)")
    p.add_argument("--schema", choices=("memotion", "reddit"), default="memotion")
    _add_emotion_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="ingest -> similarity -> group -> emotions -> analyze",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_corpus_flags(p)
    _add_embedding_flags(p)
    _add_similarity_flags(p)
    _add_emotion_flags(p)
    p.add_argument("--attribute", default="all",
                   choices=("all",) + tuple(ATTRIBUTES))
    p.add_argument("--yates", action="store_true")
    p.add_argument("--top-k", type=int, default=50)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--clique-check", action="store_true")
    _add_common_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("explain-pair", help="four-way scores and verdict for two memes",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("id_a", help="first meme id")
    p.add_argument("id_b", help="second meme id")
    _add_corpus_flags(p)
    _add_embedding_flags(p)
    p.add_argument("--threshold", type=float, default=similarity.DEFAULT_THRESHOLD)
    p.add_argument("--agg", default="mean")
    p.set_defaults(func=cmd_explain_pair)

    p = sub.add_parser("serve", help="run the HTTP API",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_corpus_flags(p)
    p.add_argument("--groups", required=True, help="groups.json path")
    p.add_argument("--responses", required=True, help="responses JSONL path (appended to)")
    p.add_argument("--images", required=True, help="static image directory")
    p.add_argument("--annotations", default=None, help="emotion sidecar CSV")
    p.add_argument("--ui-dir", default=None, help="static UI bundle directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--read-only", action="store_true",
                   help="reject all mutating requests with 403")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MemesimError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return _exit_code(exc)
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return 9


if __name__ == "__main__":
    sys.exit(main())
