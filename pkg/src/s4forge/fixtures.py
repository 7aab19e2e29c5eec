"""Fixture tooling: synthetic snapshot corpora for tests and benchmarks.

The builder constructs wire-format documents with known geometry and,
crucially, records what must happen to every node by construction intent:
`expected_outcome` replays the cleaning rules over the raw wire dicts
without touching the snapshot model or the cleaning implementation, giving
an independent ground truth for each generated page.

Screenshots are synthesized from the geometry (white page, boxed words and
media placeholders) so binary assets never need to be committed.
"""

from __future__ import annotations

import json
from pathlib import Path
from random import Random

from PIL import Image, ImageDraw

from .geometry import Viewport
from .urlhash import url_hash

DEFAULT_CORPUS_SEED = 20240801


class FixtureBuilder:
    """Assemble one wire-format snapshot with auto ids and xpaths."""

    def __init__(self, url: str, title: str = "", viewport: Viewport | None = None):
        self.url = url
        self.url_hash = url_hash(url)
        self.title = title
        self.viewport = viewport or Viewport()
        self._nodes: list[dict] = []
        self.root_id = self.element("html", None, (0, 0, self.viewport.width_px, self.viewport.height_px))
        self.body_id = self.element(
            "body", self.root_id, (0, 0, self.viewport.width_px, self.viewport.height_px)
        )

    def _xpath(self, tag: str, parent: int | None) -> str:
        if parent is None:
            return f"/{tag}[0]"
        siblings = sum(
            1
            for cid in self._nodes[parent]["child_ids"]
            if self._nodes[cid]["tag"] == tag
        )
        return f"{self._nodes[parent]['xpath']}/{tag}[{siblings}]"

    def element(
        self,
        tag: str,
        parent: int | None,
        bbox: tuple[float, float, float, float] | None,
        *,
        kind: str = "other",
        attrs: dict[str, str] | None = None,
        visible: bool = True,
        hit: int | str | None = "self",
    ) -> int:
        """Add an element; hit='self' records a self hit, an int records
        that node, None records no hit test."""
        node_id = len(self._nodes)
        node = {
            "id": node_id,
            "parent_id": parent,
            "child_ids": [],
            "tag": tag,
            "kind": kind,
            "attributes": dict(attrs or {}),
            "bbox": None if bbox is None else [float(v) for v in bbox],
            "css_visible": visible,
            "hit_target_id": node_id if hit == "self" else hit,
            "words": [],
            "xpath": self._xpath(tag, parent),
        }
        self._nodes.append(node)
        if parent is not None:
            self._nodes[parent]["child_ids"].append(node_id)
        return node_id

    def text(
        self,
        parent: int,
        content: str,
        origin: tuple[float, float],
        *,
        line_height: float = 16.0,
        char_width: float = 8.0,
        gap: float = 5.0,
        visible: bool = True,
        word_boxes: list[tuple[float, float, float, float]] | None = None,
    ) -> int:
        """Add a text node; word boxes flow left-to-right from *origin*
        unless given explicitly."""
        words = content.split()
        if word_boxes is None:
            word_boxes = []
            x, y = origin
            for word in words:
                w = char_width * len(word)
                word_boxes.append((x, y, x + w, y + line_height))
                x += w + gap
        assert len(word_boxes) == len(words)
        xs = [b[0] for b in word_boxes] + [b[2] for b in word_boxes]
        ys = [b[1] for b in word_boxes] + [b[3] for b in word_boxes]
        node_id = self.element(
            "#text",
            parent,
            (min(xs), min(ys), max(xs), max(ys)),
            kind="text",
            visible=visible,
            hit=None,
        )
        self._nodes[node_id]["words"] = [
            {"text": w, "bbox": [float(v) for v in box]} for w, box in zip(words, word_boxes)
        ]
        return node_id

    def img(
        self,
        parent: int,
        bbox: tuple[float, float, float, float],
        alt: str | None = None,
        **kwargs,
    ) -> int:
        attrs = {"alt": alt} if alt else {}
        return self.element("img", parent, bbox, kind="image", attrs=attrs, **kwargs)

    def iframe(self, parent: int, bbox: tuple[float, float, float, float]) -> int:
        return self.element("iframe", parent, bbox, kind="other")

    def table(
        self,
        parent: int,
        origin: tuple[float, float],
        cells: list[list[str]],
        *,
        cell_w: float = 120.0,
        cell_h: float = 28.0,
    ) -> int:
        """Grid table; returns the table element id."""
        x0, y0 = origin
        rows, cols = len(cells), max(len(r) for r in cells)
        table_pad = 4.0
        table_id = self.element(
            "table",
            parent,
            (x0 - table_pad, y0 - table_pad, x0 + cols * cell_w + table_pad, y0 + rows * cell_h + table_pad),
            kind="table",
        )
        for r, row in enumerate(cells):
            tr_id = self.element(
                "tr", table_id, (x0, y0 + r * cell_h, x0 + cols * cell_w, y0 + (r + 1) * cell_h)
            )
            for c, cell in enumerate(row):
                td_box = (
                    x0 + c * cell_w,
                    y0 + r * cell_h,
                    x0 + (c + 1) * cell_w,
                    y0 + (r + 1) * cell_h,
                )
                td_id = self.element("td", tr_id, td_box)
                self.text(td_id, cell, (td_box[0] + 4, td_box[1] + 6))
        return table_id

    def build(self) -> dict:
        return {
            "url": self.url,
            "url_hash": self.url_hash,
            "viewport": {"width_px": self.viewport.width_px, "height_px": self.viewport.height_px},
            "root_id": self.root_id,
            "document_title": self.title,
            "screenshot_ref": f"{self.url_hash}.png",
            "nodes": [dict(n, child_ids=list(n["child_ids"])) for n in self._nodes],
        }


# --- independent expected-outcome computation (wire-level) -----------------


def expected_outcome(wire: dict, tol: float = 2.0) -> dict:
    """Ground truth for cleaning, replayed over raw wire dicts.

    Shares no code with the cleaning module: plain dict walking, step by
    step (invisible, hit test, iframes, overflow words), with dangling hit
    pointers treated as absent once their target is gone.
    """
    nodes = {n["id"]: dict(n) for n in wire["nodes"]}
    parent = {nid: n["parent_id"] for nid, n in nodes.items()}

    def chain(nid):
        out = []
        cur = parent[nid]
        while cur is not None:
            out.append(cur)
            cur = parent[cur]
        return out

    def visible(n):
        b = n["bbox"]
        return bool(n["css_visible"]) and b is not None and b[2] > b[0] and b[3] > b[1]

    alive = {nid for nid, n in nodes.items() if visible(n) and all(visible(nodes[a]) for a in chain(nid))}
    pruned_invisible = len(nodes) - len(alive)

    doomed = set()
    for nid in alive:
        target = nodes[nid]["hit_target_id"]
        if target is None or target not in alive:
            continue  # no evidence, or the pointer died with its target
        if target != nid and nid not in chain(target):
            doomed.add(nid)
    before = len(alive)
    alive = {nid for nid in alive if nid not in doomed and not (set(chain(nid)) & doomed)}
    pruned_hit_test = before - len(alive)

    iframe_roots = {nid for nid in alive if nodes[nid]["tag"] == "iframe"}
    alive = {nid for nid in alive if nid not in iframe_roots and not (set(chain(nid)) & iframe_roots)}
    dropped_iframes = len(iframe_roots)

    surviving_words: dict[int, list[str]] = {}
    dropped_words = 0
    emptied = set()
    for nid in sorted(alive):
        n = nodes[nid]
        if n["kind"] != "text":
            continue
        bound = None
        for anc in chain(nid):
            if nodes[anc]["bbox"] is not None:
                bound = nodes[anc]["bbox"]
                break
        kept = []
        for w in n["words"]:
            b = w["bbox"]
            if bound is None or (
                b[0] >= bound[0] - tol
                and b[1] >= bound[1] - tol
                and b[2] <= bound[2] + tol
                and b[3] <= bound[3] + tol
            ):
                kept.append(w["text"])
            else:
                dropped_words += 1
        if kept:
            surviving_words[nid] = kept
        else:
            emptied.add(nid)
    alive -= emptied

    return {
        "surviving_ids": sorted(alive),
        "surviving_words": {str(k): v for k, v in surviving_words.items()},
        "report": {
            "pruned_invisible": pruned_invisible,
            "pruned_hit_test": pruned_hit_test,
            "dropped_words_overflow": dropped_words,
            "dropped_iframes": dropped_iframes,
        },
    }


# --- page recipes ----------------------------------------------------------

_WORDS = (
    "latest offers shipping arrive free every order today premium quality "
    "garden tools workshop review detail summer winter classic modern simple "
    "bright colors pattern fabric cotton jacket boots scarf gloves outdoor "
    "trail river mountain valley bundle compare checkout account contact about"
).split()

_ATTR_WORDS = ("menu-item", "hero-banner", "price", "buy-now", "sidebar", "footer-link", "card", "headline")


def _sentence(rng: Random, n: int) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(n))


def fully_featured_page(url: str = "https://example.org/full") -> dict:
    """One page on which all ten tasks are constructible."""
    fb = FixtureBuilder(url, title="Orchard Supply Weekly Deals")
    nav = fb.element("nav", fb.body_id, (0, 0, 1280, 40))
    ul = fb.element("ul", nav, (10, 5, 900, 35))
    for i, label in enumerate(("Home", "Shop", "Deals")):
        li = fb.element("li", ul, (10 + i * 120, 8, 110 + i * 120, 32), attrs={"class": "menu-item"})
        fb.text(li, label, (14 + i * 120, 10))

    h1 = fb.element("h1", fb.body_id, (40, 60, 700, 100))
    fb.text(h1, "Orchard Supply Weekly Deals", (44, 66), line_height=28, char_width=14)

    para = fb.element("p", fb.body_id, (40, 120, 900, 180))
    fb.text(para, _sentence(Random(7), 12), (44, 126))

    figure = fb.element("div", fb.body_id, (40, 200, 400, 420), attrs={"class": "hero-banner"})
    fb.img(figure, (50, 210, 350, 370), alt="orchard ladder")
    caption = fb.element("p", figure, (50, 380, 390, 410))
    fb.text(caption, "sturdy ladder for tall trees", (54, 386))

    fb.table(
        fb.body_id,
        (500, 220),
        [["Item", "Price"], ["Ladder", "Forty"], ["Pruner", "Twelve"]],
    )

    form = fb.element("form", fb.body_id, (40, 460, 500, 560))
    fb.element(
        "input", form, (50, 470, 210, 510), kind="input", attrs={"type": "submit", "class": "buy-now"}
    )
    button = fb.element("button", form, (230, 470, 390, 510), attrs={"class": "price card"})
    fb.text(button, "Add basket", (238, 480))
    return fb.build()


def corpus_page(index: int, rng: Random) -> dict:
    """One randomized corpus page with dirty features mixed in by intent."""
    url = f"https://example.org/catalog/{index}"
    title = f"{rng.choice(_WORDS).title()} {rng.choice(_WORDS).title()} Catalog"
    fb = FixtureBuilder(url, title=title)
    y = 40.0

    if rng.random() < 0.8:
        nav = fb.element("nav", fb.body_id, (0, 0, 1280, 36))
        ul = fb.element("ul", nav, (8, 4, 1000, 32))
        for i in range(rng.randint(2, 4)):
            li = fb.element(
                "li", ul, (8 + i * 150, 6, 150 + i * 150, 30), attrs={"class": "menu-item"}
            )
            fb.text(li, rng.choice(_WORDS).title(), (12 + i * 150, 8))
        y = 50.0

    if rng.random() < 0.85:
        h1 = fb.element("h1", fb.body_id, (30, y, 800, y + 36))
        fb.text(h1, title, (34, y + 4), line_height=26, char_width=12)
        y += 50

    for _ in range(rng.randint(1, 3)):
        p = fb.element("p", fb.body_id, (30, y, 1100, y + 40))
        fb.text(p, _sentence(rng, rng.randint(4, 14)), (34, y + 6))
        y += 50

    if rng.random() < 0.75:
        fig = fb.element("div", fb.body_id, (30, y, 360, y + 200), attrs={"class": rng.choice(_ATTR_WORDS)})
        alt = _sentence(rng, 2) if rng.random() < 0.7 else None
        fb.img(fig, (40, y + 8, 300, y + 150), alt=alt)
        cap = fb.element("p", fig, (40, y + 156, 350, y + 190))
        fb.text(cap, _sentence(rng, 4), (44, y + 162))
        y += 210

    if rng.random() < 0.7:
        rows = [[_sentence(rng, 1).title(), rng.choice(_WORDS).title()] for _ in range(rng.randint(2, 4))]
        fb.table(fb.body_id, (500, 300), [["Name", "Value"]] + rows)

    if rng.random() < 0.6:
        form = fb.element("form", fb.body_id, (30, y, 420, y + 60))
        fb.element(
            "input",
            form,
            (38, y + 8, 180, y + 44),
            kind="input",
            attrs={"type": "text", "class": rng.choice(_ATTR_WORDS), "id": f"f{rng.randrange(999)}x"},
        )
        button = fb.element("button", form, (200, y + 8, 330, y + 44), attrs={"class": rng.choice(_ATTR_WORDS)})
        fb.text(button, rng.choice(_WORDS).title(), (208, y + 16))
        y += 70

    # Dirt, by intent:
    if rng.random() < 0.6:  # hidden subtree
        hidden = fb.element("div", fb.body_id, (30, 900, 500, 1000), visible=False)
        inner = fb.element("p", hidden, (34, 910, 490, 950))
        fb.text(inner, _sentence(rng, rng.randint(2, 6)), (38, 916))

    if rng.random() < 0.6:  # occluded button behind an overlay sibling
        overlay = fb.element("div", fb.body_id, (600, 600, 900, 700), attrs={"class": "sidebar"})
        fb.element("button", fb.body_id, (620, 620, 760, 660), hit=overlay)

    if rng.random() < 0.5:
        fb.iframe(fb.body_id, (950, 600, 1200, 780))

    if rng.random() < 0.6:  # one word overflowing its paragraph box
        p = fb.element("p", fb.body_id, (30, 1040, 300, 1080))
        words = _sentence(rng, 3).split()
        boxes = [
            (34, 1046, 90, 1062),
            (96, 1046, 170, 1062),
            (400, 1046, 470, 1062),  # escapes the 300px right edge by far
        ]
        fb.text(p, " ".join(words), (34, 1046), word_boxes=boxes)

    if rng.random() < 0.4:  # zero-area node counts as invisible
        fb.element("span", fb.body_id, (200, 1100, 200, 1140))

    if rng.random() < 0.3:  # box-less wrapper is pruned with its children
        ghost = fb.element("div", fb.body_id, None)
        fb.element("span", ghost, (100, 1150, 160, 1170))

    return fb.build()


def synth_screenshot(wire: dict) -> Image.Image:
    """Deterministic raster stand-in: boxes for words and media on white."""
    vp = wire["viewport"]
    img = Image.new("RGB", (vp["width_px"], vp["height_px"]), (255, 255, 255))
    draw = ImageDraw.Draw(img)
    for node in wire["nodes"]:
        if not node["css_visible"] or node["bbox"] is None:
            continue
        box = tuple(int(v) for v in node["bbox"])
        if box[2] <= box[0] or box[3] <= box[1]:
            continue
        if node["kind"] == "image":
            draw.rectangle(box, fill=(170, 200, 230), outline=(90, 120, 160))
        elif node["tag"] in ("table", "tr", "td"):
            draw.rectangle(box, outline=(150, 150, 170))
        for word in node["words"]:
            wb = tuple(int(v) for v in word["bbox"])
            if wb[2] > wb[0] and wb[3] > wb[1]:
                draw.rectangle(wb, fill=(60, 60, 60))
    return img


def make_corpus(
    out_dir: str | Path,
    count: int = 60,
    seed: int = DEFAULT_CORPUS_SEED,
    *,
    screenshots: bool = False,
    duplicates: int = 2,
) -> list[Path]:
    """Write a fixture corpus: wire JSONs, expected.json, optional PNGs.

    The first page is the fully featured one; *duplicates* extra files
    re-capture existing URLs to exercise dedup.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = Random(seed)

    wires = [fully_featured_page()]
    wires += [corpus_page(i, Random(rng.randrange(2**62))) for i in range(1, count)]
    for i in range(duplicates):
        wires.append(dict(wires[rng.randrange(len(wires))]))

    paths = []
    expected = {}
    seen_hashes = set()
    for i, wire in enumerate(wires):
        path = out_dir / f"{i:04d}-{wire['url_hash']}.json"
        path.write_text(json.dumps(wire, ensure_ascii=False, indent=1), encoding="utf-8")
        paths.append(path)
        expected[path.name] = expected_outcome(wire)
        if screenshots and wire["url_hash"] not in seen_hashes:
            synth_screenshot(wire).save(out_dir / f"{wire['url_hash']}.png", format="PNG")
        seen_hashes.add(wire["url_hash"])
    (out_dir / "expected.json").write_text(
        json.dumps(expected, ensure_ascii=False, indent=1), encoding="utf-8"
    )
    return paths
