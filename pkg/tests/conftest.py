import json
from pathlib import Path
from random import Random

import pytest

from s4forge.fixtures import FixtureBuilder, fully_featured_page, synth_screenshot
from s4forge.snapshot import PageSnapshot, validate_snapshot
from s4forge.vocab import Vocabulary

FIXTURE_DIR = Path(__file__).parent / "fixtures"
CORPUS_DIR = FIXTURE_DIR / "corpus"


def load_wire(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def snapshot_from_wire(wire: dict) -> PageSnapshot:
    return validate_snapshot(json.dumps(wire))


def corpus_paths() -> list[Path]:
    return sorted(p for p in CORPUS_DIR.glob("*.json") if p.name != "expected.json")


@pytest.fixture(scope="session")
def vocab() -> Vocabulary:
    return Vocabulary.load(FIXTURE_DIR / "vocab.txt")


@pytest.fixture(scope="session")
def corpus_snapshots() -> list[PageSnapshot]:
    return [validate_snapshot(p.read_bytes()) for p in corpus_paths()]


@pytest.fixture(scope="session")
def corpus_expected() -> dict:
    return load_wire(CORPUS_DIR / "expected.json")


@pytest.fixture(scope="session")
def featured_snapshot() -> PageSnapshot:
    return snapshot_from_wire(fully_featured_page())


@pytest.fixture(scope="session")
def runnable_corpus(tmp_path_factory) -> Path:
    """Committed corpus JSONs plus synthesized screenshots, ready for run()."""
    dest = tmp_path_factory.mktemp("corpus")
    seen = set()
    for path in corpus_paths():
        wire = load_wire(path)
        (dest / path.name).write_text(json.dumps(wire), encoding="utf-8")
        if wire["url_hash"] not in seen:
            synth_screenshot(wire).save(dest / f"{wire['url_hash']}.png", format="PNG")
            seen.add(wire["url_hash"])
    return dest


def minimal_wire() -> dict:
    """Smallest well-formed tree: html -> body -> one text node."""
    fb = FixtureBuilder("https://example.org/minimal", title="hi")
    fb.text(fb.body_id, "hi", (10.0, 10.0))
    return fb.build()


_STRESS_WORDS = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta")
_STRESS_TAGS = ("div", "section", "span", "ul", "li", "p", "nav", "article")


def random_messy_wire(rng: Random) -> dict:
    """Adversarial tree for property tests: random nesting, visibility,
    cross-subtree hit targets, overflow words, iframes."""
    fb = FixtureBuilder(f"https://stress.example/{rng.randrange(10**9)}", title="Stress Page")
    ids = [fb.body_id]

    def grow(parent: int, depth: int) -> None:
        for _ in range(rng.randint(0, 3)):
            x0 = rng.uniform(0, 1000)
            y0 = rng.uniform(0, 1000)
            w = rng.uniform(0, 240)  # zero-ish width possible on purpose
            h = rng.uniform(0, 120)
            roll = rng.random()
            if roll < 0.12:
                fb.iframe(parent, (x0, y0, x0 + max(w, 10), y0 + max(h, 10)))
                continue
            if roll < 0.35 and depth > 0:
                words = [rng.choice(_STRESS_WORDS) for _ in range(rng.randint(1, 5))]
                boxes = []
                for i, _ in enumerate(words):
                    wx = x0 + i * 60 + (300 if rng.random() < 0.2 else 0)  # sometimes escape
                    boxes.append((wx, y0, wx + 50, y0 + 14))
                fb.text(parent, " ".join(words), (x0, y0), word_boxes=boxes)
                continue
            node = fb.element(
                rng.choice(_STRESS_TAGS),
                parent,
                None if rng.random() < 0.08 else (x0, y0, x0 + w, y0 + h),
                visible=rng.random() > 0.15,
                hit="self",
            )
            ids.append(node)
            if depth < 4:
                grow(node, depth + 1)

    grow(fb.body_id, 0)
    # Rewire some hit targets to arbitrary existing nodes.
    for node in fb._nodes:
        if node["hit_target_id"] is not None and rng.random() < 0.25:
            node["hit_target_id"] = rng.choice(ids + [fb.root_id])
    return fb.build()
