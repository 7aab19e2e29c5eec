import { describe, expect, it } from "vitest";

import { AssembleError, assembleSnapshot } from "../src/assemble.js";
import type { ExtractionPayload, RawNode } from "../src/wire.js";

const VIEWPORT = { width_px: 1280, height_px: 1280 };

function raw(partial: Partial<RawNode> & { id: number; parentId: number | null }): RawNode {
  return {
    tag: "div",
    isText: false,
    attributes: {},
    rect: [0, 0, 100, 100],
    cssVisible: true,
    hitId: null,
    words: [],
    ...partial,
  };
}

function pagePayload(): ExtractionPayload {
  return {
    title: "Fixture",
    nodes: [
      raw({ id: 0, parentId: null, tag: "html", rect: [0, 0, 1280, 1280] }),
      raw({ id: 1, parentId: 0, tag: "body", rect: [0, 0, 1280, 800], hitId: 3 }),
      raw({ id: 2, parentId: 1, tag: "p", rect: [10, 10, 400, 40], hitId: 2 }),
      raw({
        id: 3,
        parentId: 2,
        tag: "#text",
        isText: true,
        rect: [12, 12, 200, 30],
        words: [
          { text: "hello", rect: [12, 12, 60, 30] },
          { text: "world", rect: [66, 12, 120, 30] },
        ],
      }),
      raw({
        id: 4,
        parentId: 1,
        tag: "img",
        rect: [10, 60, 210, 160],
        attributes: { alt: "pic", "data-reactid": "x9", onclick: "no()" },
      }),
      raw({ id: 5, parentId: 1, tag: "iframe", rect: [10, 200, 100, 260] }),
      raw({ id: 6, parentId: 1, tag: "input", rect: [10, 300, 100, 330] }),
      raw({ id: 7, parentId: 1, tag: "table", rect: [10, 350, 400, 500] }),
      raw({ id: 8, parentId: 1, tag: "p", rect: [10, 520, 400, 560], hitId: 99 }),
    ],
  };
}

describe("assembleSnapshot", () => {
  it("produces the exact wire field set", () => {
    const snap = assembleSnapshot("https://example.org/a", pagePayload(), VIEWPORT);
    expect(Object.keys(snap).sort()).toEqual(
      ["document_title", "nodes", "root_id", "screenshot_ref", "url", "url_hash", "viewport"].sort(),
    );
    for (const node of snap.nodes) {
      expect(Object.keys(node).sort()).toEqual(
        [
          "attributes",
          "bbox",
          "child_ids",
          "css_visible",
          "hit_target_id",
          "id",
          "kind",
          "parent_id",
          "tag",
          "words",
          "xpath",
        ].sort(),
      );
    }
    expect(snap.url_hash).toBe("b5b10dd0429e69ac");
    expect(snap.screenshot_ref).toBe("b5b10dd0429e69ac.png");
    expect(snap.document_title).toBe("Fixture");
  });

  it("links children in document order and roots at html", () => {
    const snap = assembleSnapshot("https://example.org/a", pagePayload(), VIEWPORT);
    const byId = new Map(snap.nodes.map((n) => [n.id, n]));
    expect(snap.root_id).toBe(0);
    expect(byId.get(0)!.child_ids).toEqual([1]);
    expect(byId.get(1)!.child_ids).toEqual([2, 4, 5, 6, 7, 8]);
    expect(byId.get(2)!.child_ids).toEqual([3]);
    for (const node of snap.nodes) {
      for (const child of node.child_ids) {
        expect(byId.get(child)!.parent_id).toBe(node.id);
      }
    }
  });

  it("derives kinds and keeps only whitelisted attributes", () => {
    const snap = assembleSnapshot("https://example.org/a", pagePayload(), VIEWPORT);
    const byId = new Map(snap.nodes.map((n) => [n.id, n]));
    expect(byId.get(3)!.kind).toBe("text");
    expect(byId.get(4)!.kind).toBe("image");
    expect(byId.get(6)!.kind).toBe("input");
    expect(byId.get(7)!.kind).toBe("table");
    expect(byId.get(5)!.kind).toBe("other");
    expect(byId.get(4)!.attributes).toEqual({ alt: "pic" });
  });

  it("computes xpaths with same-tag sibling indices", () => {
    const snap = assembleSnapshot("https://example.org/a", pagePayload(), VIEWPORT);
    const byId = new Map(snap.nodes.map((n) => [n.id, n]));
    expect(byId.get(0)!.xpath).toBe("/html[0]");
    expect(byId.get(2)!.xpath).toBe("/html[0]/body[0]/p[0]");
    expect(byId.get(8)!.xpath).toBe("/html[0]/body[0]/p[1]");
    expect(byId.get(3)!.xpath).toBe("/html[0]/body[0]/p[0]/#text[0]");
  });

  it("keeps valid hit targets and clears unknown ones", () => {
    const snap = assembleSnapshot("https://example.org/a", pagePayload(), VIEWPORT);
    const byId = new Map(snap.nodes.map((n) => [n.id, n]));
    expect(byId.get(1)!.hit_target_id).toBe(3);
    expect(byId.get(8)!.hit_target_id).toBeNull();
  });

  it("iframes stay childless", () => {
    const snap = assembleSnapshot("https://example.org/a", pagePayload(), VIEWPORT);
    const iframe = snap.nodes.find((n) => n.tag === "iframe")!;
    expect(iframe.child_ids).toEqual([]);
    expect(iframe.kind).toBe("other");
  });

  it("rejects malformed payloads", () => {
    const twoRoots: ExtractionPayload = {
      title: "",
      nodes: [raw({ id: 0, parentId: null, tag: "html" }), raw({ id: 1, parentId: null })],
    };
    expect(() => assembleSnapshot("https://x.example/", twoRoots, VIEWPORT)).toThrow(AssembleError);

    const wordless: ExtractionPayload = {
      title: "",
      nodes: [
        raw({ id: 0, parentId: null, tag: "html" }),
        raw({ id: 1, parentId: 0, tag: "#text", isText: true, words: [] }),
      ],
    };
    expect(() => assembleSnapshot("https://x.example/", wordless, VIEWPORT)).toThrow(AssembleError);
  });
});
