/**
 * Live-browser fidelity checks against the bundled fixture pages served
 * over local HTTP. Skipped automatically when no headless browser binary
 * is present (set S4FORGE_BROWSER to point at one); everything else in
 * this suite runs browserless.
 */

import { execFileSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { createServer, type Server } from "node:http";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DEFAULT_CONFIG, Harvester, findBrowser, type CaptureConfig } from "../src/capture.js";
import { captureBatch } from "../src/batch.js";
import type { WireSnapshot } from "../src/wire.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");
const browser = findBrowser();

function pngDimensions(path: string): [number, number] {
  const buf = readFileSync(path);
  return [buf.readUInt32BE(16), buf.readUInt32BE(20)];
}

function pythonValidatorAvailable(): boolean {
  try {
    execFileSync("s4forge", ["--help"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}

describe.skipIf(!browser)("live harvest against local fixtures", () => {
  let server: Server;
  let base: string;
  let harvester: Harvester;
  const outDir = mkdtempSync(join(tmpdir(), "harvest-out-"));
  const cfg: CaptureConfig = { ...DEFAULT_CONFIG, settleDelayMs: 100, outputDir: outDir };
  const captured = new Map<string, WireSnapshot>();

  beforeAll(async () => {
    server = createServer((req, res) => {
      try {
        const body = readFileSync(join(FIXTURES, req.url!.replace(/^\//, "")));
        res.writeHead(200, { "content-type": "text/html" });
        res.end(body);
      } catch {
        res.writeHead(404);
        res.end();
      }
    });
    await new Promise<void>((r) => server.listen(0, "127.0.0.1", r));
    const address = server.address();
    if (address === null || typeof address === "string") throw new Error("no port");
    base = `http://127.0.0.1:${address.port}`;
    harvester = await Harvester.launch(cfg.viewport);
    for (const page of ["basic.html", "hidden.html", "overlay.html", "rich.html"]) {
      const result = await harvester.capture(`${base}/${page}`, cfg);
      captured.set(page, result.snapshot);
    }
  }, 120_000);

  afterAll(async () => {
    await harvester?.close();
    server?.close();
  });

  it("screenshots are exactly 1280x1280", () => {
    for (const snapshot of captured.values()) {
      expect(pngDimensions(join(outDir, snapshot.screenshot_ref))).toEqual([1280, 1280]);
    }
  });

  it("basic page records the paragraph with its word count", () => {
    const snap = captured.get("basic.html")!;
    const para = snap.nodes.find((n) => n.attributes.id === "para")!;
    expect(para.css_visible).toBe(true);
    const text = snap.nodes.find((n) => n.parent_id === para.id && n.kind === "text")!;
    expect(text.words.map((w) => w.text)).toEqual(["five", "little", "words", "right", "here"]);
    expect(snap.document_title).toBe("Basic Fixture Page");
  });

  it("display:none and visibility:hidden elements are css-invisible", () => {
    const snap = captured.get("hidden.html")!;
    const ghost = snap.nodes.find((n) => n.attributes.id === "ghost")!;
    const faded = snap.nodes.find((n) => n.attributes.id === "faded")!;
    expect(ghost.css_visible).toBe(false);
    expect(faded.css_visible).toBe(false);
  });

  it("occluded link's hit target points outside its subtree", () => {
    const snap = captured.get("overlay.html")!;
    const byId = new Map(snap.nodes.map((n) => [n.id, n]));
    const link = snap.nodes.find((n) => n.attributes.id === "buried")!;
    expect(link.hit_target_id).not.toBeNull();
    let cur: number | null = link.hit_target_id;
    let insideSubtree = false;
    while (cur !== null) {
      if (cur === link.id) {
        insideSubtree = true;
        break;
      }
      cur = byId.get(cur)!.parent_id;
    }
    expect(insideSubtree).toBe(false);
  });

  it("hit targets always reference existing nodes", () => {
    for (const snap of captured.values()) {
      const ids = new Set(snap.nodes.map((n) => n.id));
      for (const node of snap.nodes) {
        if (node.hit_target_id !== null) expect(ids.has(node.hit_target_id)).toBe(true);
      }
    }
  });

  it("re-capturing a static page yields an isomorphic tree", async () => {
    const first = captured.get("rich.html")!;
    const again = (await harvester.capture(`${base}/rich.html`, cfg)).snapshot;
    expect(again.nodes.map((n) => [n.id, n.parent_id, n.tag])).toEqual(
      first.nodes.map((n) => [n.id, n.parent_id, n.tag]),
    );
    for (let i = 0; i < first.nodes.length; i++) {
      const a = first.nodes[i].bbox;
      const b = again.nodes[i].bbox;
      if (a === null || b === null) continue;
      for (let k = 0; k < 4; k++) expect(Math.abs(a[k] - b[k])).toBeLessThanOrEqual(1);
    }
  }, 60_000);

  it("batch capture reports per-target failures without aborting", async () => {
    const summary = await captureBatch(
      [`${base}/basic.html`, `${base}/missing.html`, `${base}/rich.html`],
      async (t) => {
        await harvester.capture(t, { ...cfg, navigationTimeoutMs: 10_000 });
      },
    );
    expect(summary.ok_count).toBeGreaterThanOrEqual(2);
  }, 60_000);

  it.skipIf(!pythonValidatorAvailable())("snapshots pass the Python validator", () => {
    for (const snapshot of captured.values()) {
      execFileSync("s4forge", ["validate", join(outDir, `${snapshot.url_hash}.json`)], {
        stdio: "ignore",
      });
    }
  });
});

describe("browser discovery", () => {
  it("findBrowser returns a path or null without throwing", () => {
    const found = findBrowser();
    expect(found === null || typeof found === "string").toBe(true);
  });
});
