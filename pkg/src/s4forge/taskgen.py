"""Construction of the ten pre-training samples from a cleaned snapshot.

Every constructor is pure given (snapshot, rng): re-running with the same
seed yields a byte-identical sample, independent of scheduling. All of
them expect a cleaned snapshot — surviving nodes are visible and boxed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Mapping, Sequence

from .errors import (
    NoCaption,
    NoGroundableElement,
    NoGroup,
    NoImage,
    NoLayout,
    NoRegion,
    NoTable,
    NoTaskPossible,
    NoTextNode,
    NoTitle,
    TaskSkip,
    TooFewElements,
    VocabMissing,
)
from .geometry import BBox, union_all
from .simplify import WordRef, cleaned_xpath, simplify
from .snapshot import DomNode, NodeKind, PageSnapshot, Word
from .tokens import bbox_tokens
from .vocab import Vocabulary

REGION_WORD_CAP = 50
SCREEN_PARSING_MASK_RATIO = 0.5
IMAGE_GROUNDING_MASK_RATIO = 0.9
TITLE_OVERLAP_THRESHOLD = 0.6

# Fixed attribute order for descriptions (grounding) and targets
# (attribute prediction); the target format stops at alt.
DESCRIPTION_ATTR_ORDER = ("class", "id", "label", "for", "alt", "title", "type")
TARGET_ATTR_ORDER = ("class", "id", "label", "for", "alt")


class TaskKind(str, Enum):
    SCREEN_PARSING = "screen_parsing"
    OCR = "ocr"
    IMAGE_GROUNDING = "image_grounding"
    ELEMENT_GROUNDING = "element_grounding"
    ATTRIBUTE_PREDICTION = "attribute_prediction"
    NODE_RELATION = "node_relation"
    TABLE_DETECTION = "table_detection"
    TABLE_PARSING = "table_parsing"
    SCREEN_TITLING = "screen_titling"
    LAYOUT_ANALYSIS = "layout_analysis"


class NodeRelation(str, Enum):
    SELF = "self"
    PARENT = "parent"
    CHILD = "child"
    SIBLING = "sibling"
    ANCESTOR = "ancestor"
    DESCENDANT = "descendant"
    OTHERS = "others"


class DirectiveOp(str, Enum):
    DRAW_BOX_OUTLINE = "draw_box_outline"
    MASK_RECT = "mask_rect"


@dataclass(frozen=True)
class RenderDirective:
    op: DirectiveOp
    rect: BBox
    style: str = "primary"  # "secondary" marks NRP's second outline


def outline(rect: BBox, style: str = "primary") -> RenderDirective:
    return RenderDirective(DirectiveOp.DRAW_BOX_OUTLINE, rect, style)


def mask_rect(rect: BBox) -> RenderDirective:
    return RenderDirective(DirectiveOp.MASK_RECT, rect)


@dataclass(frozen=True)
class TaskSample:
    kind: TaskKind
    screenshot_ref: str
    directives: tuple[RenderDirective, ...]
    target: str
    seed: int
    url_hash: str
    input_text: str | None = None
    masked_fraction: float | None = None


@dataclass(frozen=True)
class MixtureWeights:
    weights: Mapping[TaskKind, float]

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("mixture weights must be non-negative")
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("at least one mixture weight must be positive")

    @classmethod
    def uniform(cls) -> "MixtureWeights":
        return cls({kind: 1.0 for kind in TaskKind})

    @classmethod
    def s4_nl(cls) -> "MixtureWeights":
        kinds = (
            TaskKind.SCREEN_PARSING,
            TaskKind.ATTRIBUTE_PREDICTION,
            TaskKind.TABLE_PARSING,
            TaskKind.SCREEN_TITLING,
            TaskKind.NODE_RELATION,
        )
        return cls({kind: 1.0 for kind in kinds})

    @classmethod
    def s4_loc(cls) -> "MixtureWeights":
        kinds = (
            TaskKind.SCREEN_PARSING,
            TaskKind.OCR,
            TaskKind.IMAGE_GROUNDING,
            TaskKind.ELEMENT_GROUNDING,
            TaskKind.TABLE_DETECTION,
            TaskKind.LAYOUT_ANALYSIS,
        )
        return cls({kind: 1.0 for kind in kinds})

    @classmethod
    def s4_joint(cls) -> "MixtureWeights":
        return cls(
            {
                TaskKind.SCREEN_PARSING: 1.0,
                TaskKind.ATTRIBUTE_PREDICTION: 0.5,
                TaskKind.SCREEN_TITLING: 0.5,
                TaskKind.NODE_RELATION: 0.1,
                TaskKind.TABLE_PARSING: 0.1,
                TaskKind.OCR: 0.1,
                TaskKind.TABLE_DETECTION: 0.1,
                TaskKind.LAYOUT_ANALYSIS: 0.1,
                TaskKind.IMAGE_GROUNDING: 0.1,
                TaskKind.ELEMENT_GROUNDING: 0.1,
            }
        )

    @classmethod
    def named(cls, name: str) -> "MixtureWeights":
        table = {
            "uniform": cls.uniform,
            "s4-nl": cls.s4_nl,
            "s4_nl": cls.s4_nl,
            "s4-loc": cls.s4_loc,
            "s4_loc": cls.s4_loc,
            "s4-joint": cls.s4_joint,
            "s4_joint": cls.s4_joint,
        }
        try:
            return table[name.lower()]()
        except KeyError:
            raise ValueError(f"unknown scheme {name!r}") from None


# --- shared helpers -------------------------------------------------------


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def iter_words(s: PageSnapshot, scope_id: int) -> list[tuple[WordRef, Word]]:
    """All words under *scope_id* in document pre-order."""
    out = []
    for node in s.preorder(scope_id):
        for idx, word in enumerate(node.words):
            out.append(((node.id, idx), word))
    return out


def subtree_word_counts(s: PageSnapshot) -> dict[int, int]:
    counts: dict[int, int] = {}
    for node in reversed(list(s.preorder())):
        counts[node.id] = len(node.words) + sum(counts[c] for c in node.child_ids)
    return counts


def select_region(s: PageSnapshot, max_words: int, rng: Random) -> int:
    """Uniform draw among maximal subtrees holding 1..max_words words.

    Maximal: the subtree fits the cap while its parent's does not.
    """
    counts = subtree_word_counts(s)
    candidates = [
        node.id
        for node in s.preorder()
        if 1 <= counts[node.id] <= max_words
        and (node.parent_id is None or counts[node.parent_id] > max_words)
    ]
    if not candidates:
        raise NoRegion("no subtree with a workable word count")
    return candidates[rng.randrange(len(candidates))]


def mask_words(
    s: PageSnapshot, scope_id: int, ratio: float, rng: Random
) -> tuple[tuple[RenderDirective, ...], frozenset[WordRef]]:
    """Pick round(ratio * W) words uniformly without replacement; one
    MaskRect per picked word, emitted in document order."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"mask ratio must be in [0, 1], got {ratio}")
    words = iter_words(s, scope_id)
    if not words:
        return (), frozenset()
    k = _round_half_up(ratio * len(words))
    picked = sorted(rng.sample(range(len(words)), k))
    directives = tuple(mask_rect(words[i][1].bbox) for i in picked)
    return directives, frozenset(words[i][0] for i in picked)


def filter_attr_tokens(values: Sequence[str], vocab: Vocabulary) -> list[str]:
    """Drop noise tokens from attribute values.

    Gone: anything containing a digit (pure numbers and letter+digit
    soup alike), single characters, and strings the vocabulary cannot
    represent. Survivor order is preserved.
    """
    if vocab is None:
        raise VocabMissing("attribute filtering needs a loaded vocabulary")
    out = []
    for token in values:
        if len(token) < 2:
            continue
        if any(ch.isdigit() for ch in token):
            continue
        if not vocab.is_representable(token):
            continue
        out.append(token)
    return out


def nearest_text_node(s: PageSnapshot, img_id: int) -> int:
    """Text node with minimal tree distance to *img_id*; pre-order breaks ties."""
    img = s.node(img_id)
    up_depth = {img.id: 0}
    for steps, anc in enumerate(s.ancestor_chain(img.id), start=1):
        up_depth[anc] = steps

    best: tuple[int, int] | None = None
    best_id = -1
    for rank, node in enumerate(s.preorder()):
        if not node.is_text:
            continue
        down = 0
        cur = node.id
        while cur not in up_depth:
            cur = s.nodes[cur].parent_id
            down += 1
        dist = up_depth[cur] + down
        key = (dist, rank)
        if best is None or key < best:
            best = key
            best_id = node.id
    if best is None:
        raise NoTextNode("snapshot has no text node")
    return best_id


def node_relation(s: PageSnapshot, a: int, b: int) -> NodeRelation:
    node_a = s.node(a)
    node_b = s.node(b)
    if a == b:
        return NodeRelation.SELF
    if node_b.parent_id == a:
        return NodeRelation.PARENT
    if node_a.parent_id == b:
        return NodeRelation.CHILD
    if node_a.parent_id is not None and node_a.parent_id == node_b.parent_id:
        return NodeRelation.SIBLING
    if a in s.ancestor_chain(b):
        return NodeRelation.ANCESTOR
    if b in s.ancestor_chain(a):
        return NodeRelation.DESCENDANT
    return NodeRelation.OTHERS


def _tokenize(text: str) -> list[str]:
    return re.findall(r"[^\W_]+", text.casefold())


def title_candidates(s: PageSnapshot) -> list[tuple[DomNode, float]]:
    """On-screen text nodes overlapping the document title, best first.

    Overlap is the fraction of the node's distinct tokens found in the
    title; ties rank taller boxes (bigger type) first, then pre-order.
    """
    title_tokens = set(_tokenize(s.document_title))
    if not title_tokens:
        return []
    scored = []
    for rank, node in enumerate(s.preorder()):
        if not node.is_text:
            continue
        tokens = set(_tokenize(node.text()))
        if not tokens:
            continue
        overlap = len(tokens & title_tokens) / len(tokens)
        if overlap >= TITLE_OVERLAP_THRESHOLD:
            height = node.bbox.height if node.bbox is not None else 0.0
            scored.append((node, overlap, height, rank))
    scored.sort(key=lambda t: (-t[1], -t[2], t[3]))
    return [(node, overlap) for node, overlap, _, _ in scored]


def _visible_elements(s: PageSnapshot) -> list[DomNode]:
    return [n for n in s.preorder() if not n.is_text and n.bbox is not None]


def _table_entries(s: PageSnapshot) -> list[tuple[DomNode, BBox]]:
    """Each visible table with the union of its boxed proper descendants."""
    entries = []
    for node in s.preorder():
        if node.tag != "table":
            continue
        boxes = [d.bbox for d in s.preorder(node.id) if d.id != node.id and d.bbox is not None]
        if boxes:
            entries.append((node, union_all(boxes)))
    return entries


# --- the ten constructors -------------------------------------------------


def _sample(
    kind: TaskKind,
    s: PageSnapshot,
    directives: tuple[RenderDirective, ...],
    target: str,
    seed: int,
    input_text: str | None = None,
    masked_fraction: float | None = None,
) -> TaskSample:
    return TaskSample(
        kind=kind,
        screenshot_ref=s.screenshot_ref,
        directives=directives,
        target=target,
        seed=seed,
        url_hash=s.url_hash,
        input_text=input_text,
        masked_fraction=masked_fraction,
    )


def make_screen_parsing(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Outlined region, half its words blanked; target is the anonymous
    bracket structure carrying every word (masked ones included)."""
    region = select_region(s, REGION_WORD_CAP, rng)
    node = s.node(region)
    mask_dirs, masked = mask_words(s, region, SCREEN_PARSING_MASK_RATIO, rng)
    total = len(iter_words(s, region))
    directives = (outline(node.bbox),) + mask_dirs
    target = simplify(s, region, named_tags=False, masked_words=masked).text
    return _sample(
        TaskKind.SCREEN_PARSING, s, directives, target, seed,
        masked_fraction=len(masked) / total,
    )


def make_ocr(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """word<x><y><x><y>... over an outlined region of at most 50 words."""
    region = select_region(s, REGION_WORD_CAP, rng)
    node = s.node(region)
    target = "".join(
        word.text + bbox_tokens(word.bbox, s.viewport) for _, word in iter_words(s, region)
    )
    return _sample(TaskKind.OCR, s, (outline(node.bbox),), target, seed)


def make_image_grounding(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Caption -> image box, with 90% of page text blanked so the box
    cannot be read off a visible caption."""
    images = [n for n in s.preorder() if n.kind is NodeKind.IMAGE and n.bbox is not None]
    if not images:
        raise NoImage("no visible <img> on the page")
    img = images[rng.randrange(len(images))]

    options = []
    alt = img.attributes.get("alt", "").strip()
    if alt:
        options.append(alt)
    try:
        neighbor = nearest_text_node(s, img.id)
        options.append(s.node(neighbor).text())
    except NoTextNode:
        pass
    if not options:
        raise NoCaption("image has no alt text and the page has no text node")
    caption = options[0] if len(options) == 1 else options[rng.randrange(len(options))]

    mask_dirs, masked = mask_words(s, s.root_id, IMAGE_GROUNDING_MASK_RATIO, rng)
    total = len(iter_words(s, s.root_id))
    target = caption + bbox_tokens(img.bbox, s.viewport)
    return _sample(
        TaskKind.IMAGE_GROUNDING, s, mask_dirs, target, seed,
        input_text=caption,
        masked_fraction=(len(masked) / total) if total else None,
    )


def make_element_grounding(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Tag-plus-attributes description -> element box. No masking, no outline."""
    if vocab is None:
        raise VocabMissing("element grounding needs the token vocabulary")
    candidates = []
    for node in _visible_elements(s):
        tokens: list[str] = []
        for attr in DESCRIPTION_ATTR_ORDER:
            value = node.attributes.get(attr)
            if value:
                tokens.extend(filter_attr_tokens(value.split(), vocab))
        if tokens:
            candidates.append((node, node.tag + " " + " ".join(tokens)))
    if not candidates:
        raise NoGroundableElement("every element description filtered to nothing")
    node, description = candidates[rng.randrange(len(candidates))]
    target = bbox_tokens(node.bbox, s.viewport)
    return _sample(TaskKind.ELEMENT_GROUNDING, s, (), target, seed, input_text=description)


def make_attribute_prediction(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Outline one (tag, attributes) group; predict '{tag} {class} {id}
    {label} {for} {alt}' with noise tokens filtered out."""
    if vocab is None:
        raise VocabMissing("attribute prediction needs the token vocabulary")
    groups: dict[tuple, list[DomNode]] = {}
    for node in _visible_elements(s):
        key = (node.tag, tuple(sorted(node.attributes.items())))
        groups.setdefault(key, []).append(node)
    if not groups:
        raise NoGroup("no visible elements to group")
    (tag, _), members = list(groups.items())[rng.randrange(len(groups))]

    parts = [tag]
    attrs = members[0].attributes
    for attr in TARGET_ATTR_ORDER:
        value = attrs.get(attr)
        if not value:
            continue
        kept = filter_attr_tokens(value.split(), vocab)
        if kept:
            parts.append(" ".join(kept))
    directives = tuple(outline(m.bbox) for m in members)
    return _sample(TaskKind.ATTRIBUTE_PREDICTION, s, directives, " ".join(parts), seed)


def make_node_relation(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Two outlined elements; predict their tree relationship.

    Labels are drawn uniformly over the relations the page can realize,
    then a pair realizing the label is drawn uniformly — uniform over raw
    pairs would drown everything in 'others'.
    """
    elements = _visible_elements(s)
    if len(elements) < 2:
        raise TooFewElements("node relation needs at least two visible elements")
    buckets: dict[NodeRelation, list[tuple[DomNode, DomNode]]] = {r: [] for r in NodeRelation}
    for a in elements:
        for b in elements:
            buckets[node_relation(s, a.id, b.id)].append((a, b))
    available = [r for r in NodeRelation if buckets[r]]
    relation = available[rng.randrange(len(available))]
    pairs = buckets[relation]
    a, b = pairs[rng.randrange(len(pairs))]
    directives = (outline(a.bbox, "primary"), outline(b.bbox, "secondary"))
    return _sample(TaskKind.NODE_RELATION, s, directives, relation.value, seed)


def make_table_detection(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Merged box tokens for every table, document order, plain screenshot."""
    entries = _table_entries(s)
    if not entries:
        raise NoTable("no visible table with boxed content")
    target = "".join(bbox_tokens(box, s.viewport) for _, box in entries)
    return _sample(TaskKind.TABLE_DETECTION, s, (), target, seed)


def make_table_parsing(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """One outlined table; target keeps original tag names and cell text."""
    entries = _table_entries(s)
    if not entries:
        raise NoTable("no visible table with boxed content")
    table, merged = entries[rng.randrange(len(entries))]
    target = simplify(s, table.id, named_tags=True).text
    return _sample(TaskKind.TABLE_PARSING, s, (outline(merged),), target, seed)


def make_screen_titling(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Blank the on-screen title words; predict the <title> text."""
    title = s.document_title.strip()
    if not title:
        raise NoTitle("document has no title")
    candidates = title_candidates(s)
    if not candidates:
        raise NoTitle("no on-screen text matches the document title")
    directives = tuple(
        mask_rect(word.bbox) for node, _ in candidates for word in node.words
    )
    return _sample(TaskKind.SCREEN_TITLING, s, directives, title, seed)


def make_layout_analysis(
    s: PageSnapshot, rng: Random, *, seed: int = 0, vocab: Vocabulary | None = None
) -> TaskSample:
    """Group leaves by cleaned Xpath; emit tag + merged box per group."""
    groups: dict[str, tuple[str, list[BBox]]] = {}
    for node in s.preorder():
        if node.child_ids or node.bbox is None:
            continue
        cx = cleaned_xpath(s, node.id)
        if not cx.path:
            continue
        groups.setdefault(cx.path, (cx.last_tag(), []))[1].append(node.bbox)
    if not groups:
        raise NoLayout("no leaf has a whitelisted ancestor")
    target = "".join(
        tag + bbox_tokens(union_all(boxes), s.viewport) for tag, boxes in groups.values()
    )
    return _sample(TaskKind.LAYOUT_ANALYSIS, s, (), target, seed)


CONSTRUCTORS = {
    TaskKind.SCREEN_PARSING: make_screen_parsing,
    TaskKind.OCR: make_ocr,
    TaskKind.IMAGE_GROUNDING: make_image_grounding,
    TaskKind.ELEMENT_GROUNDING: make_element_grounding,
    TaskKind.ATTRIBUTE_PREDICTION: make_attribute_prediction,
    TaskKind.NODE_RELATION: make_node_relation,
    TaskKind.TABLE_DETECTION: make_table_detection,
    TaskKind.TABLE_PARSING: make_table_parsing,
    TaskKind.SCREEN_TITLING: make_screen_titling,
    TaskKind.LAYOUT_ANALYSIS: make_layout_analysis,
}


def sample_task(
    s: PageSnapshot,
    weights: MixtureWeights,
    rng: Random,
    *,
    seed: int = 0,
    vocab: Vocabulary | None = None,
) -> TaskSample:
    """Draw a task kind proportional to its weight among constructible
    kinds and build it; kinds that skip are removed and the draw repeats."""
    remaining = {k: w for k, w in weights.weights.items() if w > 0}
    while remaining:
        kinds = [k for k in TaskKind if k in remaining]
        chosen = rng.choices(kinds, weights=[remaining[k] for k in kinds], k=1)[0]
        try:
            return CONSTRUCTORS[chosen](s, rng, seed=seed, vocab=vocab)
        except TaskSkip:
            del remaining[chosen]
    raise NoTaskPossible(f"no constructible task for page {s.url_hash}")
