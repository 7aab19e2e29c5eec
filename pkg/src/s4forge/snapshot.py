"""Snapshot data model: the rendered-page record handed over by the harvester.

The wire format (one JSON document per page, nodes as a flat array) is
documented in docs/snapshot-format.md. `validate_snapshot` is the only
entry point for foreign bytes; everything downstream may assume the
invariants it enforces. Snapshots are immutable after validation and safe
to share across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Any, Iterator, Mapping, Union

from .errors import GeometryError, SchemaError, TreeError, UnknownNode
from .geometry import BBox, Viewport
from .urlhash import HASH_HEX_LEN, url_hash

# Only these attributes ever feed the grounding/attribute tasks; everything
# else is dropped at ingest.
ATTRIBUTE_WHITELIST = ("class", "id", "label", "for", "alt", "title", "type")


class NodeKind(str, Enum):
    TEXT = "text"
    IMAGE = "image"
    TABLE = "table"
    INPUT = "input"
    OTHER = "other"


@dataclass(frozen=True)
class Word:
    """One whitespace-free text run with its rendered box."""

    text: str
    bbox: BBox


@dataclass(frozen=True)
class DomNode:
    id: int
    parent_id: int | None
    child_ids: tuple[int, ...]
    tag: str
    kind: NodeKind
    attributes: Mapping[str, str]
    bbox: BBox | None
    css_visible: bool
    hit_target_id: int | None
    words: tuple[Word, ...]
    xpath: str

    @property
    def is_text(self) -> bool:
        return self.kind is NodeKind.TEXT

    def text(self) -> str:
        return " ".join(w.text for w in self.words)


@dataclass(frozen=True)
class PageSnapshot:
    url: str
    url_hash: str
    viewport: Viewport
    nodes: Mapping[int, DomNode]
    root_id: int
    document_title: str
    screenshot_ref: str

    def node(self, node_id: int) -> DomNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id}") from None

    def children(self, node_id: int) -> list[DomNode]:
        return [self.nodes[c] for c in self.node(node_id).child_ids]

    def preorder(self, start_id: int | None = None) -> Iterator[DomNode]:
        """Document-order traversal from *start_id* (default: root)."""
        stack = [self.root_id if start_id is None else start_id]
        if stack[0] not in self.nodes:
            raise UnknownNode(f"no node with id {stack[0]}")
        while stack:
            node = self.nodes[stack.pop()]
            yield node
            stack.extend(reversed(node.child_ids))

    def subtree_ids(self, root_id: int) -> set[int]:
        return {n.id for n in self.preorder(root_id)}

    def ancestor_chain(self, node_id: int) -> list[int]:
        """Ids from *node_id*'s parent up to the root."""
        chain = []
        cur = self.node(node_id).parent_id
        while cur is not None:
            chain.append(cur)
            cur = self.nodes[cur].parent_id
        return chain

    def is_ancestor_or_self(self, ancestor_id: int, node_id: int) -> bool:
        if ancestor_id == node_id:
            return True
        return ancestor_id in self.ancestor_chain(node_id)

    def with_nodes(self, nodes: Mapping[int, DomNode]) -> "PageSnapshot":
        return replace(self, nodes=dict(nodes))


def node_depth(snapshot: PageSnapshot, node_id: int) -> int:
    """Edges from the root down to *node_id*; the root itself is 0."""
    return len(snapshot.ancestor_chain(node_id))


# --- wire format ---------------------------------------------------------

_TOP_FIELDS = {"url", "url_hash", "viewport", "root_id", "document_title", "screenshot_ref", "nodes"}
_NODE_REQUIRED = {"id", "parent_id", "child_ids", "tag", "kind", "css_visible", "xpath"}
_NODE_OPTIONAL = {"attributes", "bbox", "hit_target_id", "words"}


def _expect(obj: Any, path: str, typ: type, what: str) -> Any:
    if not isinstance(obj, typ) or isinstance(obj, bool) and typ is int:
        raise SchemaError(path, f"expected {what}, got {type(obj).__name__}")
    return obj


def _parse_bbox(raw: Any, path: str, vp: Viewport) -> BBox:
    seq = _expect(raw, path, list, "a 4-element array")
    if len(seq) != 4 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq):
        raise SchemaError(path, "expected 4 numbers")
    try:
        box = BBox.from_seq(seq)
    except GeometryError as exc:
        raise GeometryError(f"{path}: {exc}") from None
    return box.clip(vp)


def _parse_node(raw: Any, idx: int, vp: Viewport) -> DomNode:
    path = f"$.nodes[{idx}]"
    obj = _expect(raw, path, dict, "an object")
    unknown = set(obj) - _NODE_REQUIRED - _NODE_OPTIONAL
    if unknown:
        raise SchemaError(path, f"unknown fields {sorted(unknown)}")
    missing = _NODE_REQUIRED - set(obj)
    if missing:
        raise SchemaError(path, f"missing fields {sorted(missing)}")

    node_id = _expect(obj["id"], f"{path}.id", int, "an integer")
    parent_id = obj["parent_id"]
    if parent_id is not None:
        parent_id = _expect(parent_id, f"{path}.parent_id", int, "an integer or null")
    child_ids = tuple(
        _expect(c, f"{path}.child_ids[{i}]", int, "an integer")
        for i, c in enumerate(_expect(obj["child_ids"], f"{path}.child_ids", list, "an array"))
    )
    tag = _expect(obj["tag"], f"{path}.tag", str, "a string").lower()
    kind_raw = _expect(obj["kind"], f"{path}.kind", str, "a string")
    try:
        kind = NodeKind(kind_raw)
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown kind {kind_raw!r}") from None
    css_visible = _expect(obj["css_visible"], f"{path}.css_visible", bool, "a boolean")
    xpath = _expect(obj["xpath"], f"{path}.xpath", str, "a string")

    attrs_raw = _expect(obj.get("attributes", {}), f"{path}.attributes", dict, "an object")
    attributes = {}
    for key, value in attrs_raw.items():
        if key not in ATTRIBUTE_WHITELIST:
            continue  # dropped at ingest by design
        attributes[key] = _expect(value, f"{path}.attributes.{key}", str, "a string")

    bbox_raw = obj.get("bbox")
    bbox = None if bbox_raw is None else _parse_bbox(bbox_raw, f"{path}.bbox", vp)

    hit_raw = obj.get("hit_target_id")
    hit_target_id = None if hit_raw is None else _expect(hit_raw, f"{path}.hit_target_id", int, "an integer or null")

    words = []
    for i, w in enumerate(_expect(obj.get("words", []), f"{path}.words", list, "an array")):
        wpath = f"{path}.words[{i}]"
        wobj = _expect(w, wpath, dict, "an object")
        if set(wobj) != {"text", "bbox"}:
            raise SchemaError(wpath, "expected exactly {text, bbox}")
        text = _expect(wobj["text"], f"{wpath}.text", str, "a string")
        if not text or any(ch.isspace() for ch in text):
            raise SchemaError(f"{wpath}.text", "word must be non-empty with no whitespace")
        words.append(Word(text, _parse_bbox(wobj["bbox"], f"{wpath}.bbox", vp)))

    if kind is NodeKind.TEXT and not words:
        raise SchemaError(f"{path}.words", "text node has no words")
    if kind is not NodeKind.TEXT and words:
        raise SchemaError(f"{path}.words", f"{kind.value} node carries words")
    if kind is NodeKind.IMAGE and tag != "img":
        raise SchemaError(f"{path}.tag", f"image node has tag {tag!r}, expected 'img'")

    return DomNode(
        id=node_id,
        parent_id=parent_id,
        child_ids=child_ids,
        tag=tag,
        kind=kind,
        attributes=attributes,
        bbox=bbox,
        css_visible=css_visible,
        hit_target_id=hit_target_id,
        words=tuple(words),
        xpath=xpath,
    )


def _check_tree(nodes: Mapping[int, DomNode], root_id: int) -> None:
    if root_id not in nodes:
        raise TreeError(f"root_id {root_id} is not a node")
    root = nodes[root_id]
    if root.parent_id is not None:
        raise TreeError(f"root node {root_id} has a parent")
    if root.tag != "html":
        raise TreeError(f"root tag is {root.tag!r}, expected 'html'")

    for node in nodes.values():
        if node.id != root_id:
            if node.parent_id is None:
                raise TreeError(f"node {node.id} has no parent and is not the root")
            if node.parent_id == node.id:
                raise TreeError(f"node {node.id} is its own parent")
            parent = nodes.get(node.parent_id)
            if parent is None:
                raise TreeError(f"node {node.id} has dangling parent {node.parent_id}")
            if parent.child_ids.count(node.id) != 1:
                raise TreeError(f"node {node.id} appears {parent.child_ids.count(node.id)} times in parent's children")
        for child_id in node.child_ids:
            child = nodes.get(child_id)
            if child is None:
                raise TreeError(f"node {node.id} lists missing child {child_id}")
            if child.parent_id != node.id:
                raise TreeError(f"child {child_id} does not point back at {node.id}")
        if node.hit_target_id is not None and node.hit_target_id not in nodes:
            raise TreeError(f"node {node.id} hit target {node.hit_target_id} does not exist")

    # Everything must be reachable from the root: catches cycles and islands.
    seen: set[int] = set()
    stack = [root_id]
    while stack:
        cur = stack.pop()
        if cur in seen:
            raise TreeError(f"node {cur} reachable twice (cycle)")
        seen.add(cur)
        stack.extend(nodes[cur].child_ids)
    if seen != set(nodes):
        orphans = sorted(set(nodes) - seen)
        raise TreeError(f"nodes {orphans[:5]} unreachable from root")


def validate_snapshot(raw: Union[bytes, str, IO[bytes]]) -> PageSnapshot:
    """Parse and validate one harvester wire document.

    Raises SchemaError for missing/ill-typed/unknown fields (with the JSON
    path), TreeError for structural damage, GeometryError for inverted
    boxes. On success every type invariant holds and all boxes are clipped
    to the viewport.
    """
    if hasattr(raw, "read"):
        raw = raw.read()
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from None
    obj = _expect(doc, "$", dict, "an object")

    unknown = set(obj) - _TOP_FIELDS
    if unknown:
        raise SchemaError("$", f"unknown fields {sorted(unknown)}")
    missing = _TOP_FIELDS - set(obj)
    if missing:
        raise SchemaError("$", f"missing fields {sorted(missing)}")

    url = _expect(obj["url"], "$.url", str, "a string")
    got_hash = _expect(obj["url_hash"], "$.url_hash", str, "a string")
    want_hash = url_hash(url)
    if len(got_hash) != HASH_HEX_LEN or got_hash != want_hash:
        raise SchemaError("$.url_hash", f"digest {got_hash!r} does not match normalized url ({want_hash})")

    vp_obj = _expect(obj["viewport"], "$.viewport", dict, "an object")
    if set(vp_obj) != {"width_px", "height_px"}:
        raise SchemaError("$.viewport", "expected exactly {width_px, height_px}")
    width = _expect(vp_obj["width_px"], "$.viewport.width_px", int, "an integer")
    height = _expect(vp_obj["height_px"], "$.viewport.height_px", int, "an integer")
    if width <= 0 or height <= 0:
        raise SchemaError("$.viewport", f"non-positive viewport {width}x{height}")
    viewport = Viewport(width, height)

    root_id = _expect(obj["root_id"], "$.root_id", int, "an integer")
    title = _expect(obj["document_title"], "$.document_title", str, "a string")
    screenshot_ref = _expect(obj["screenshot_ref"], "$.screenshot_ref", str, "a string")

    nodes_raw = _expect(obj["nodes"], "$.nodes", list, "an array")
    nodes: dict[int, DomNode] = {}
    for idx, node_raw in enumerate(nodes_raw):
        node = _parse_node(node_raw, idx, viewport)
        if node.id in nodes:
            raise TreeError(f"duplicate node id {node.id}")
        nodes[node.id] = node

    _check_tree(nodes, root_id)

    return PageSnapshot(
        url=url,
        url_hash=got_hash,
        viewport=viewport,
        nodes=nodes,
        root_id=root_id,
        document_title=title,
        screenshot_ref=screenshot_ref,
    )


def snapshot_to_wire(snapshot: PageSnapshot) -> dict:
    """Inverse of validate_snapshot; round-trips to a structurally equal snapshot."""
    return {
        "url": snapshot.url,
        "url_hash": snapshot.url_hash,
        "viewport": {"width_px": snapshot.viewport.width_px, "height_px": snapshot.viewport.height_px},
        "root_id": snapshot.root_id,
        "document_title": snapshot.document_title,
        "screenshot_ref": snapshot.screenshot_ref,
        "nodes": [
            {
                "id": n.id,
                "parent_id": n.parent_id,
                "child_ids": list(n.child_ids),
                "tag": n.tag,
                "kind": n.kind.value,
                "attributes": dict(n.attributes),
                "bbox": None if n.bbox is None else n.bbox.to_list(),
                "css_visible": n.css_visible,
                "hit_target_id": n.hit_target_id,
                "words": [{"text": w.text, "bbox": w.bbox.to_list()} for w in n.words],
                "xpath": n.xpath,
            }
            for n in sorted(snapshot.nodes.values(), key=lambda n: n.id)
        ],
    }
