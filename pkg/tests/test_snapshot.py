import json
from random import Random

import pytest

from s4forge.errors import GeometryError, SchemaError, TreeError, UnknownNode
from s4forge.snapshot import NodeKind, node_depth, snapshot_to_wire, validate_snapshot
from s4forge.urlhash import normalize_url, url_hash

from conftest import minimal_wire, random_messy_wire, snapshot_from_wire


def test_minimal_snapshot_validates():
    snap = snapshot_from_wire(minimal_wire())
    assert len(snap.nodes) == 3
    assert snap.node(snap.root_id).tag == "html"
    text = [n for n in snap.nodes.values() if n.kind is NodeKind.TEXT]
    assert len(text) == 1 and text[0].words[0].text == "hi"


def test_root_must_be_html():
    wire = minimal_wire()
    wire["nodes"][0]["tag"] = "div"
    with pytest.raises(TreeError, match="html"):
        validate_snapshot(json.dumps(wire))


def test_self_parent_cycle_is_tree_error():
    wire = minimal_wire()
    node = wire["nodes"][2]
    node["parent_id"] = node["id"]
    wire["nodes"][1]["child_ids"] = []
    with pytest.raises(TreeError):
        validate_snapshot(json.dumps(wire))


def test_inverted_bbox_is_geometry_error():
    wire = minimal_wire()
    wire["nodes"][1]["bbox"] = [10, 0, 5, 20]
    with pytest.raises(GeometryError):
        validate_snapshot(json.dumps(wire))


def test_unknown_field_rejected_with_path():
    wire = minimal_wire()
    wire["nodes"][0]["surprise"] = 1
    with pytest.raises(SchemaError, match=r"\$\.nodes\[0\]"):
        validate_snapshot(json.dumps(wire))
    wire = minimal_wire()
    wire["extra"] = True
    with pytest.raises(SchemaError, match=r"\$:"):
        validate_snapshot(json.dumps(wire))


def test_missing_field_rejected():
    wire = minimal_wire()
    del wire["nodes"][1]["tag"]
    with pytest.raises(SchemaError, match="tag"):
        validate_snapshot(json.dumps(wire))


def test_dangling_hit_target_rejected():
    wire = minimal_wire()
    wire["nodes"][1]["hit_target_id"] = 999
    with pytest.raises(TreeError, match="hit target"):
        validate_snapshot(json.dumps(wire))


def test_orphan_node_rejected():
    wire = minimal_wire()
    wire["nodes"].append(dict(wire["nodes"][2], id=77, parent_id=1, words=[{"text": "x", "bbox": [0, 0, 1, 1]}]))
    # parent does not list 77 as a child
    with pytest.raises(TreeError):
        validate_snapshot(json.dumps(wire))


def test_text_node_without_words_rejected():
    wire = minimal_wire()
    wire["nodes"][2]["words"] = []
    with pytest.raises(SchemaError, match="words"):
        validate_snapshot(json.dumps(wire))


def test_img_kind_requires_img_tag():
    wire = minimal_wire()
    wire["nodes"][1]["kind"] = "image"
    with pytest.raises(SchemaError, match="img"):
        validate_snapshot(json.dumps(wire))


def test_word_with_whitespace_rejected():
    wire = minimal_wire()
    wire["nodes"][2]["words"] = [{"text": "two words", "bbox": [0, 0, 10, 10]}]
    with pytest.raises(SchemaError, match="whitespace"):
        validate_snapshot(json.dumps(wire))


def test_url_hash_mismatch_rejected():
    wire = minimal_wire()
    wire["url_hash"] = "0" * 16
    with pytest.raises(SchemaError, match="url_hash"):
        validate_snapshot(json.dumps(wire))


def test_non_whitelisted_attributes_dropped_at_ingest():
    wire = minimal_wire()
    wire["nodes"][1]["attributes"] = {"class": "main", "data-reactid": "77", "style": "color:red"}
    snap = validate_snapshot(json.dumps(wire))
    assert dict(snap.nodes[1].attributes) == {"class": "main"}


def test_boxes_clipped_to_viewport():
    wire = minimal_wire()
    wire["nodes"][2]["words"] = [{"text": "hi", "bbox": [-50, -10, 3000, 20]}]
    wire["nodes"][2]["bbox"] = [-50, -10, 3000, 20]
    snap = validate_snapshot(json.dumps(wire))
    word = snap.nodes[2].words[0]
    assert word.bbox.x_min == 0 and word.bbox.x_max == 1280
    assert word.bbox.y_min == 0 and word.bbox.y_max == 20


def test_child_listed_once_per_parent():
    wire = minimal_wire()
    wire["nodes"][1]["child_ids"] = [2, 2]
    with pytest.raises(TreeError):
        validate_snapshot(json.dumps(wire))


def test_validate_is_idempotent_over_reserialization():
    for seed in range(8):
        wire = random_messy_wire(Random(seed))
        snap = validate_snapshot(json.dumps(wire))
        again = validate_snapshot(json.dumps(snapshot_to_wire(snap)))
        assert again == snap


def test_node_depth_trivial():
    snap = snapshot_from_wire(minimal_wire())
    assert node_depth(snap, snap.root_id) == 0
    body = snap.node(snap.root_id).child_ids[0]
    assert node_depth(snap, body) == 1
    with pytest.raises(UnknownNode):
        node_depth(snap, 404)


def test_node_depth_matches_recursive_walk_oracle():
    def oracle_depths(snap):
        depths = {}

        def walk(node_id, depth):
            depths[node_id] = depth
            for child in snap.node(node_id).child_ids:
                walk(child, depth + 1)

        walk(snap.root_id, 0)
        return depths

    for seed in range(6):
        snap = snapshot_from_wire(random_messy_wire(Random(seed)))
        expect = oracle_depths(snap)
        for node_id in snap.nodes:
            assert node_depth(snap, node_id) == expect[node_id]


def test_url_normalization_and_hash():
    assert normalize_url("HTTPS://Example.ORG/Path?q=1#frag") == "https://example.org/Path?q=1"
    assert url_hash("https://example.org/a") == url_hash("HTTPS://EXAMPLE.org/a#x")
    assert url_hash("https://example.org/a") != url_hash("https://example.org/A")
    assert len(url_hash("x")) == 16
