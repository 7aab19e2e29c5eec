"""End-to-end orchestration: ingest, dedup, clean, sample, composite, write.

Every page is processed independently with a seed derived from
(corpus_seed, url_hash), so output is byte-identical across runs and
across worker counts; page-level failures are counted, logged and never
fatal. Dedup and manifest merging are the only corpus-level passes.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from PIL import Image

from . import cleaning, writer
from .compositor import apply_directives, encode_png
from .errors import ConfigError, EmptyCorpus, EmptyPage, NoTaskPossible, S4ForgeError
from .geometry import Viewport
from .snapshot import validate_snapshot
from .taskgen import MixtureWeights, sample_task
from .urlhash import derive_seed
from .vocab import Vocabulary

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    input_dir: Path
    output_dir: Path
    scheme: str = "uniform"
    corpus_seed: int = 0
    viewport: Viewport = field(default_factory=Viewport)
    vocab_file: Path | None = None
    epsilon_px: float = cleaning.DEFAULT_CONTAINMENT_TOL
    shard_size: int = 1000
    workers: int = 1
    samples_per_page: int = 1

    def validate(self) -> None:
        if not Path(self.input_dir).is_dir():
            raise ConfigError(f"input dir {self.input_dir} does not exist")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.shard_size < 1:
            raise ConfigError("shard_size must be >= 1")
        if self.samples_per_page < 1:
            raise ConfigError("samples_per_page must be >= 1")
        if self.vocab_file is not None and not Path(self.vocab_file).is_file():
            raise ConfigError(f"vocab file {self.vocab_file} does not exist")
        try:
            MixtureWeights.named(self.scheme)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class RunReport:
    pages_in: int = 0
    pages_deduped: int = 0
    duplicates_dropped: int = 0
    pages_failed: int = 0
    pages_cleaned_empty: int = 0
    samples_out: int = 0
    per_task_counts: dict = field(default_factory=dict)
    clean_report_totals: cleaning.CleanReport = field(default_factory=cleaning.CleanReport)
    elapsed: float = 0.0


_WORKER_VOCAB: dict[str, Vocabulary] = {}


def _load_vocab(path: str | None) -> Vocabulary | None:
    if path is None:
        return None
    if path not in _WORKER_VOCAB:
        _WORKER_VOCAB[path] = Vocabulary.load(path)
    return _WORKER_VOCAB[path]


def _process_page(args: tuple) -> dict:
    """Worker body: one page in, records+PNG bytes out. Must stay importable
    at module top level for process pools."""
    (path_str, input_dir, scheme, corpus_seed, samples_per_page, vocab_path, eps, vp_w, vp_h) = args
    out: dict = {"path": path_str, "records": [], "pngs": [], "empty": False, "failed": None,
                 "clean": (0, 0, 0, 0)}
    try:
        snapshot = validate_snapshot(Path(path_str).read_bytes())
        try:
            cleaned, report = cleaning.clean(snapshot, eps)
        except EmptyPage:
            out["empty"] = True
            return out
        out["clean"] = (
            report.pruned_invisible,
            report.pruned_hit_test,
            report.dropped_words_overflow,
            report.dropped_iframes,
        )

        png_path = Path(input_dir) / cleaned.screenshot_ref
        base = Image.open(png_path)
        base.load()
        if (base.width, base.height) != (vp_w, vp_h):
            out["failed"] = f"screenshot is {base.width}x{base.height}, viewport is {vp_w}x{vp_h}"
            return out
        base = base.convert("RGB")

        weights = MixtureWeights.named(scheme)
        vocab = _load_vocab(vocab_path)
        for j in range(samples_per_page):
            seed = derive_seed(corpus_seed, cleaned.url_hash, j)
            try:
                sample = sample_task(cleaned, weights, Random(seed), seed=seed, vocab=vocab)
            except NoTaskPossible:
                continue
            sid = f"{cleaned.url_hash}-{j:02d}"
            image_path = f"{writer.IMAGE_DIR}/{sid}.png"
            composited = apply_directives(base, sample.directives)
            out["records"].append(writer.sample_record(sample, sid, image_path))
            out["pngs"].append(encode_png(composited))
    except S4ForgeError as exc:
        out["failed"] = f"{type(exc).__name__}: {exc}"
    except OSError as exc:
        out["failed"] = f"io error: {exc}"
    return out


def run(cfg: PipelineConfig) -> RunReport:
    cfg.validate()
    started = time.monotonic()
    report = RunReport()

    paths = sorted(Path(cfg.input_dir).glob("*.json"))
    paths = [p for p in paths if p.name != "expected.json"]
    report.pages_in = len(paths)
    if not paths:
        raise EmptyCorpus(f"no snapshot JSON under {cfg.input_dir}")

    # Corpus-level dedup: first file per url_hash wins, in path order. The
    # hash is read from the wire here; full validation happens per worker.
    unique_paths = []
    seen: set[str] = set()
    for path in paths:
        try:
            doc = json.loads(path.read_bytes())
            page_hash = str(doc["url_hash"])
        except Exception as exc:  # noqa: BLE001 - any unreadable file is a failed page
            report.pages_failed += 1
            log.warning("skipping %s: %s", path.name, exc)
            continue
        if page_hash in seen:
            report.duplicates_dropped += 1
            continue
        seen.add(page_hash)
        unique_paths.append(path)
    report.pages_deduped = len(unique_paths)

    jobs = [
        (
            str(path),
            str(cfg.input_dir),
            cfg.scheme,
            cfg.corpus_seed,
            cfg.samples_per_page,
            None if cfg.vocab_file is None else str(cfg.vocab_file),
            cfg.epsilon_px,
            cfg.viewport.width_px,
            cfg.viewport.height_px,
        )
        for path in unique_paths
    ]
    pool = None
    if cfg.workers == 1:
        results = map(_process_page, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=cfg.workers)
        results = pool.map(_process_page, jobs, chunksize=8)

    def emit():
        for res in results:
            if res["failed"]:
                report.pages_failed += 1
                log.warning("page %s failed: %s", Path(res["path"]).name, res["failed"])
                continue
            if res["empty"]:
                report.pages_cleaned_empty += 1
                continue
            inv, hit, words, iframes = res["clean"]
            report.clean_report_totals.add(cleaning.CleanReport(inv, hit, words, iframes))
            yield from zip(res["records"], res["pngs"])

    try:
        fragment = writer.write_shard(emit(), cfg.output_dir, cfg.shard_size)
    finally:
        if pool is not None:
            pool.shutdown()

    manifest = writer.merge_manifests([fragment], cfg.corpus_seed, cfg.viewport)
    (Path(cfg.output_dir) / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")

    report.samples_out = len(fragment.records)
    report.per_task_counts = dict(fragment.per_task_counts)
    report.elapsed = time.monotonic() - started
    return report


def stats(manifest_path: str | Path) -> dict:
    """Read-only summary of a written manifest; returns what it prints."""
    manifest = writer.DatasetManifest.from_json(Path(manifest_path).read_text(encoding="utf-8"))
    records = manifest.records
    lengths = [len(r["target"]) for r in records]
    histogram = [0] * 10
    for r in records:
        ratio = r.get("mask_ratio")
        if ratio is None:
            continue
        histogram[min(int(ratio * 10), 9)] += 1

    summary = {
        "per_task_counts": dict(manifest.per_task_counts),
        "records": len(records),
        "mean_target_length": (sum(lengths) / len(lengths)) if lengths else 0.0,
        "mask_ratio_histogram": histogram,
    }

    print(f"records: {summary['records']}")
    print("per-task counts:")
    for kind, count in sorted(manifest.per_task_counts.items()):
        print(f"  {kind:<22} {count}")
    print(f"mean target length: {summary['mean_target_length']:.1f}")
    print("mask-ratio histogram (width 0.1):")
    for i, n in enumerate(histogram):
        print(f"  [{i / 10:.1f}, {(i + 1) / 10:.1f}) {n}")
    return summary
