"""Pre-processing over validated snapshots.

Four pruning passes (invisible subtrees, failed hit tests, iframes,
overflow words) plus corpus-level URL dedup. All passes are pure: they
return new snapshots and never mutate their input. Step order is fixed —
visibility first, since hit-test evidence on invisible nodes is
meaningless.

Each pass decides removals against its entry tree, removes whole
subtrees, and then clears hit_target_id pointers that referenced removed
nodes. The clearing keeps referential integrity and makes clean() a
fixpoint: a pointer whose target vanished had already passed its
descendant-or-self check, so the evidence is simply spent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Hashable, Iterable, Sequence, TypeVar

from .errors import EmptyPage
from .snapshot import DomNode, PageSnapshot

T = TypeVar("T")

DEFAULT_CONTAINMENT_TOL = 2.0  # px of slack for browser sub-pixel rounding


@dataclass
class CleanReport:
    pruned_invisible: int = 0
    pruned_hit_test: int = 0
    dropped_words_overflow: int = 0
    dropped_iframes: int = 0

    def total(self) -> int:
        return (
            self.pruned_invisible
            + self.pruned_hit_test
            + self.dropped_words_overflow
            + self.dropped_iframes
        )

    def add(self, other: "CleanReport") -> None:
        self.pruned_invisible += other.pruned_invisible
        self.pruned_hit_test += other.pruned_hit_test
        self.dropped_words_overflow += other.dropped_words_overflow
        self.dropped_iframes += other.dropped_iframes


def node_is_visible(node: DomNode) -> bool:
    """CSS-visible with a non-degenerate box. Zero-area boxes render nothing."""
    return (
        node.css_visible
        and node.bbox is not None
        and node.bbox.width > 0
        and node.bbox.height > 0
    )


def _drop_subtrees(s: PageSnapshot, doomed_roots: Iterable[int]) -> PageSnapshot:
    """Remove whole subtrees, fix child lists, clear dangling hit targets."""
    removed: set[int] = set()
    for root in doomed_roots:
        if root not in removed:
            removed |= s.subtree_ids(root)
    if s.root_id in removed:
        raise EmptyPage("cleaning pruned the document root")
    if not removed:
        return s

    kept: dict[int, DomNode] = {}
    for node in s.nodes.values():
        if node.id in removed:
            continue
        child_ids = tuple(c for c in node.child_ids if c not in removed)
        hit = node.hit_target_id
        if hit is not None and hit in removed:
            hit = None
        if child_ids != node.child_ids or hit != node.hit_target_id:
            node = replace(node, child_ids=child_ids, hit_target_id=hit)
        kept[node.id] = node
    return s.with_nodes(kept)


def prune_invisible(s: PageSnapshot) -> PageSnapshot:
    """Remove every subtree whose root is CSS-hidden, box-less, or zero-area."""
    doomed = [n.id for n in s.nodes.values() if not node_is_visible(n)]
    return _drop_subtrees(s, doomed)


def prune_hit_test(s: PageSnapshot) -> PageSnapshot:
    """Remove subtrees whose recorded center hit falls outside themselves.

    A node whose hit target is itself or any of its descendants is kept;
    anything else is occluded by an unrelated element and goes. Nodes
    with no recorded hit target are kept.
    """
    doomed = []
    for node in s.nodes.values():
        if node.hit_target_id is None:
            continue
        if not s.is_ancestor_or_self(node.id, node.hit_target_id):
            doomed.append(node.id)
    return _drop_subtrees(s, doomed)


def drop_iframes(s: PageSnapshot) -> PageSnapshot:
    """Remove every <iframe>; their contents are unreachable cross-origin anyway."""
    doomed = [n.id for n in s.nodes.values() if n.tag == "iframe"]
    return _drop_subtrees(s, doomed)


def _governing_bbox(s: PageSnapshot, node: DomNode):
    for anc_id in s.ancestor_chain(node.id):
        anc = s.nodes[anc_id]
        if anc.bbox is not None:
            return anc.bbox
    return None


def filter_overflow_words(s: PageSnapshot, tol: float = DEFAULT_CONTAINMENT_TOL) -> PageSnapshot:
    """Drop words that escape the box of their nearest boxed ancestor.

    Text nodes left without any word are removed entirely.
    """
    trimmed: dict[int, DomNode] = {}
    emptied: list[int] = []
    for node in s.preorder():
        if not node.is_text:
            continue
        bound = _governing_bbox(s, node)
        if bound is None:
            continue
        keep = tuple(w for w in node.words if bound.contains(w.bbox, tol))
        if len(keep) == len(node.words):
            continue
        if keep:
            trimmed[node.id] = replace(node, words=keep)
        else:
            emptied.append(node.id)

    if trimmed:
        nodes = dict(s.nodes)
        nodes.update(trimmed)
        s = s.with_nodes(nodes)
    if emptied:
        s = _drop_subtrees(s, emptied)
    return s


def _word_count(s: PageSnapshot) -> int:
    return sum(len(n.words) for n in s.nodes.values())


def clean(
    s: PageSnapshot, tol: float = DEFAULT_CONTAINMENT_TOL
) -> tuple[PageSnapshot, CleanReport]:
    """Full cleaning pass: invisible, hit-test, iframes, overflow words.

    Raises EmptyPage when nothing visible survives. Idempotent: cleaning
    a cleaned snapshot reports all zeros.
    """
    report = CleanReport()

    before = len(s.nodes)
    s = prune_invisible(s)
    report.pruned_invisible = before - len(s.nodes)

    before = len(s.nodes)
    s = prune_hit_test(s)
    report.pruned_hit_test = before - len(s.nodes)

    iframes = sum(1 for n in s.nodes.values() if n.tag == "iframe")
    s = drop_iframes(s)
    report.dropped_iframes = iframes

    words_before = _word_count(s)
    s = filter_overflow_words(s, tol)
    report.dropped_words_overflow = words_before - _word_count(s)

    return s, report


def dedup_urls(
    snapshot_refs: Sequence[T], key: Callable[[T], Hashable] | None = None
) -> list[T]:
    """First snapshot per url_hash wins; input order preserved."""
    if key is None:
        key = lambda ref: ref.url_hash  # noqa: E731
    seen: set[Hashable] = set()
    kept = []
    for ref in snapshot_refs:
        k = key(ref)
        if k in seen:
            continue
        seen.add(k)
        kept.append(ref)
    return kept
