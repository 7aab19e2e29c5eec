"""Shard and manifest persistence.

Records are newline-delimited JSON, UTF-8, coordinate tokens kept as
literal text; shards are named shard-%05d.jsonl and images live under
images/<sample_id>.png. Inspectability beats compactness at desk scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DuplicateId
from .geometry import Viewport
from .taskgen import TaskKind, TaskSample

SHARD_PATTERN = "shard-%05d.jsonl"
IMAGE_DIR = "images"

RECORD_FIELDS = (
    "sample_id",
    "kind",
    "image_path",
    "target",
    "input_text",
    "seed",
    "url_hash",
    "mask_ratio",
)


def sample_record(sample: TaskSample, sample_id: str, image_path: str) -> dict:
    return {
        "sample_id": sample_id,
        "kind": sample.kind.value,
        "image_path": image_path,
        "target": sample.target,
        "input_text": sample.input_text,
        "seed": sample.seed,
        "url_hash": sample.url_hash,
        "mask_ratio": sample.masked_fraction,
    }


@dataclass
class ManifestFragment:
    per_task_counts: dict[str, int] = field(default_factory=dict)
    records: list[dict] = field(default_factory=list)

    def add(self, record: dict) -> None:
        self.records.append(record)
        self.per_task_counts[record["kind"]] = self.per_task_counts.get(record["kind"], 0) + 1


@dataclass
class DatasetManifest:
    corpus_seed: int
    viewport: Viewport
    per_task_counts: dict[str, int]
    records: list[dict]

    def to_json(self) -> str:
        payload = {
            "corpus_seed": self.corpus_seed,
            "viewport": {"width_px": self.viewport.width_px, "height_px": self.viewport.height_px},
            "per_task_counts": {k.value: self.per_task_counts.get(k.value, 0) for k in TaskKind},
            "records": self.records,
        }
        return json.dumps(payload, ensure_ascii=False, indent=None, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        payload = json.loads(text)
        return cls(
            corpus_seed=payload["corpus_seed"],
            viewport=Viewport(payload["viewport"]["width_px"], payload["viewport"]["height_px"]),
            per_task_counts=dict(payload["per_task_counts"]),
            records=list(payload["records"]),
        )


def write_shard(
    samples: Iterable[tuple[dict, bytes | None]],
    out_dir: str | Path,
    shard_size: int,
) -> ManifestFragment:
    """Write (record, optional png bytes) pairs into rolling shards.

    Records land in submission order; a new shard starts every
    shard_size records. Returns the fragment covering everything written.
    """
    if shard_size <= 0:
        raise ValueError(f"shard_size must be positive, got {shard_size}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    image_dir = out_dir / IMAGE_DIR

    fragment = ManifestFragment()
    shard_idx = 0
    shard_file = None
    try:
        for record, png in samples:
            if fragment.records and len(fragment.records) % shard_size == 0:
                shard_file.close()
                shard_file = None
            if shard_file is None:
                shard_file = (out_dir / (SHARD_PATTERN % shard_idx)).open("w", encoding="utf-8")
                shard_idx += 1
            shard_file.write(json.dumps(record, ensure_ascii=False) + "\n")
            if png is not None:
                image_dir.mkdir(parents=True, exist_ok=True)
                (image_dir / f"{record['sample_id']}.png").write_bytes(png)
            fragment.add(record)
    finally:
        if shard_file is not None:
            shard_file.close()
    return fragment


def merge_manifests(
    fragments: Iterable[ManifestFragment],
    corpus_seed: int,
    viewport: Viewport,
) -> DatasetManifest:
    """Concatenate fragment records and sum counts; sample ids must be disjoint."""
    counts: dict[str, int] = {}
    records: list[dict] = []
    seen: set[str] = set()
    for fragment in fragments:
        for record in fragment.records:
            sid = record["sample_id"]
            if sid in seen:
                raise DuplicateId(f"sample id {sid} appears in two fragments")
            seen.add(sid)
            records.append(record)
        for kind, n in fragment.per_task_counts.items():
            counts[kind] = counts.get(kind, 0) + n
    return DatasetManifest(corpus_seed, viewport, counts, records)


def read_shards(out_dir: str | Path) -> Iterator[dict]:
    """Re-read every record from the shard files, in shard/record order."""
    for path in sorted(Path(out_dir).glob("shard-*.jsonl")):
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield json.loads(line)
