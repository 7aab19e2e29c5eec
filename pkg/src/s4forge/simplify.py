"""Simplified-HTML serialization and cleaned Xpaths.

The bracket serialization is a training target, not a document: brackets
are '<' and '>', attributes are never emitted, and in anonymous mode no
tag names appear at all. Anonymous mode additionally collapses chains of
single-child elements to one bracket level; named mode keeps every
element so structural tags (table/tr/td) survive into the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet

from .snapshot import DomNode, PageSnapshot

# Tags that carry the semantic abstraction of an element; everything else
# is dropped from cleaned Xpaths.
XPATH_TAG_WHITELIST = ("p", "table", "form", "dl", "button", "ol", "ul", "nav", "img", "object")

WordRef = tuple[int, int]  # (node id, word index)


@dataclass(frozen=True)
class SimplifiedHtml:
    text: str
    named_tags: bool


@dataclass(frozen=True)
class CleanedXpath:
    path: str  # "tag[i]/tag[j]/..."; empty when nothing is whitelisted

    def segments(self) -> list[str]:
        return self.path.split("/") if self.path else []

    def last_tag(self) -> str:
        segs = self.segments()
        return segs[-1].split("[", 1)[0] if segs else ""


def _serialize(s: PageSnapshot, node: DomNode, named: bool) -> str:
    if node.is_text:
        return node.text()

    cur = node
    if not named:
        # Collapse single-child element chains to one bracket level.
        while len(cur.child_ids) == 1:
            only = s.nodes[cur.child_ids[0]]
            if only.is_text:
                break
            cur = only

    inner = ""
    for child_id in cur.child_ids:
        part = _serialize(s, s.nodes[child_id], named)
        if not part:
            continue
        if inner and not part.startswith("<") and not inner.endswith(">"):
            inner += " " + part
        else:
            inner += part

    if named:
        if inner and not inner.startswith("<"):
            return f"<{node.tag} {inner}>"
        return f"<{node.tag}{inner}>"
    return f"<{inner}>"


def simplify(
    s: PageSnapshot,
    region_root: int,
    named_tags: bool,
    masked_words: AbstractSet[WordRef] | None = None,
) -> SimplifiedHtml:
    """Serialize the subtree at *region_root*.

    masked_words is accepted for parity with the sample constructors but
    never changes the output: masking blanks the rendered image only, the
    target text always carries every word.
    """
    del masked_words
    node = s.node(region_root)
    if node.is_text:
        # A bare text region serializes to its words; zero brackets is balanced.
        return SimplifiedHtml(node.text(), named_tags)
    return SimplifiedHtml(_serialize(s, node, named_tags), named_tags)


def cleaned_xpath(s: PageSnapshot, node_id: int) -> CleanedXpath:
    """Root-to-node path filtered to the whitelist.

    Positional indices count same-tag siblings only, so paths stay stable
    when non-whitelisted siblings are pruned.
    """
    path_ids = list(reversed(s.ancestor_chain(node_id))) + [node_id]
    segments = []
    for nid in path_ids:
        node = s.nodes[nid]
        if node.tag not in XPATH_TAG_WHITELIST:
            continue
        index = 0
        if node.parent_id is not None:
            for sibling_id in s.nodes[node.parent_id].child_ids:
                if sibling_id == nid:
                    break
                if s.nodes[sibling_id].tag == node.tag:
                    index += 1
        segments.append(f"{node.tag}[{index}]")
    return CleanedXpath("/".join(segments))
