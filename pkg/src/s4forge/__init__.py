"""s4forge: strongly-supervised pretraining samples from web-page snapshots."""

from .cleaning import CleanReport, clean, dedup_urls
from .geometry import BBox, Viewport
from .snapshot import DomNode, NodeKind, PageSnapshot, Word, node_depth, validate_snapshot
from .taskgen import (
    MixtureWeights,
    NodeRelation,
    RenderDirective,
    TaskKind,
    TaskSample,
    sample_task,
)

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "CleanReport",
    "DomNode",
    "MixtureWeights",
    "NodeKind",
    "NodeRelation",
    "PageSnapshot",
    "RenderDirective",
    "TaskKind",
    "TaskSample",
    "Viewport",
    "Word",
    "clean",
    "dedup_urls",
    "node_depth",
    "sample_task",
    "validate_snapshot",
    "__version__",
]
