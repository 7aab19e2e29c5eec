"""s4forge command line: run the pipeline, inspect manifests, validate
snapshots, generate fixture corpora."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, EmptyCorpus, S4ForgeError
from .geometry import Viewport
from .pipeline import PipelineConfig, run, stats
from .snapshot import validate_snapshot

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EMPTY = 2


def _parse_viewport(text: str) -> Viewport:
    try:
        w, h = text.lower().split("x")
        return Viewport(int(w), int(h))
    except (ValueError, S4ForgeError):
        raise argparse.ArgumentTypeError(f"viewport must look like 1280x1280, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="s4forge")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="generate one sample per page from harvested snapshots")
    p_run.add_argument("--input", required=True, type=Path, help="dir of <hash>.json + <hash>.png")
    p_run.add_argument("--out", required=True, type=Path)
    p_run.add_argument("--scheme", default="uniform", help="uniform | s4-nl | s4-loc | s4-joint")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--vocab", type=Path, default=None, help="sentencepiece-style vocab file")
    p_run.add_argument("--shard-size", type=int, default=1000)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--viewport", type=_parse_viewport, default=Viewport())
    p_run.add_argument("--epsilon-px", type=float, default=2.0)
    p_run.add_argument("--samples-per-page", type=int, default=1)

    p_stats = sub.add_parser("stats", help="summarize a written manifest")
    p_stats.add_argument("manifest", type=Path)

    p_val = sub.add_parser("validate", help="check one snapshot JSON against the schema")
    p_val.add_argument("snapshot", type=Path)

    p_fix = sub.add_parser("fixtures", help="generate a synthetic fixture corpus")
    p_fix.add_argument("--out", required=True, type=Path)
    p_fix.add_argument("--count", type=int, default=60)
    p_fix.add_argument("--seed", type=int, default=None)
    p_fix.add_argument("--screenshots", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)

    if args.command == "run":
        cfg = PipelineConfig(
            input_dir=args.input,
            output_dir=args.out,
            scheme=args.scheme,
            corpus_seed=args.seed,
            viewport=args.viewport,
            vocab_file=args.vocab,
            epsilon_px=args.epsilon_px,
            shard_size=args.shard_size,
            workers=args.workers,
            samples_per_page=args.samples_per_page,
        )
        try:
            report = run(cfg)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except EmptyCorpus as exc:
            print(f"empty corpus: {exc}", file=sys.stderr)
            return EXIT_EMPTY
        print(
            f"pages_in={report.pages_in} deduped={report.pages_deduped} "
            f"duplicates_dropped={report.duplicates_dropped} failed={report.pages_failed} "
            f"cleaned_empty={report.pages_cleaned_empty} samples_out={report.samples_out} "
            f"elapsed={report.elapsed:.2f}s"
        )
        for kind, count in sorted(report.per_task_counts.items()):
            print(f"  {kind:<22} {count}")
        totals = report.clean_report_totals
        print(
            f"cleaning: invisible={totals.pruned_invisible} hit_test={totals.pruned_hit_test} "
            f"overflow_words={totals.dropped_words_overflow} iframes={totals.dropped_iframes}"
        )
        return EXIT_OK

    if args.command == "stats":
        try:
            stats(args.manifest)
        except OSError as exc:
            print(f"cannot read manifest: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    if args.command == "validate":
        try:
            snapshot = validate_snapshot(args.snapshot.read_bytes())
        except OSError as exc:
            print(f"cannot read snapshot: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except S4ForgeError as exc:
            print(f"invalid snapshot: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(
            f"ok: {snapshot.url} nodes={len(snapshot.nodes)} "
            f"viewport={snapshot.viewport.width_px}x{snapshot.viewport.height_px}"
        )
        return EXIT_OK

    if args.command == "fixtures":
        from .fixtures import DEFAULT_CORPUS_SEED, make_corpus

        seed = DEFAULT_CORPUS_SEED if args.seed is None else args.seed
        paths = make_corpus(args.out, args.count, seed, screenshots=args.screenshots)
        print(f"wrote {len(paths)} snapshots to {args.out}")
        return EXIT_OK

    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
