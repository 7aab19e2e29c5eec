/**
 * One rendered capture: navigate, settle, extract, screenshot, write
 * <url_hash>.json plus <url_hash>.png into the output directory.
 */

import { mkdir, writeFile } from "node:fs/promises";
import { accessSync, constants } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { pathToFileURL } from "node:url";

import { assembleSnapshot } from "./assemble.js";
import { CdpConnection, CdpError, NavigationTimeout, RenderFailure, launchBrowser } from "./cdp.js";
import { EXTRACTION_SCRIPT } from "./extract.js";
import { ExtractionPayload, WireSnapshot } from "./wire.js";
import type { ChildProcess } from "node:child_process";

export class EmptyPage extends CdpError {}

export interface CaptureConfig {
  viewport: { width_px: number; height_px: number };
  navigationTimeoutMs: number;
  settleDelayMs: number;
  outputDir: string;
}

export const DEFAULT_CONFIG: Omit<CaptureConfig, "outputDir"> = {
  viewport: { width_px: 1280, height_px: 1280 },
  navigationTimeoutMs: 30_000,
  settleDelayMs: 300,
};

export interface CaptureResult {
  snapshotPath: string;
  screenshotPath: string;
  snapshot: WireSnapshot;
}

const BROWSER_CANDIDATES = [
  "chromium",
  "chromium-browser",
  "google-chrome",
  "google-chrome-stable",
  "chrome",
  "headless_shell",
];

export function findBrowser(explicit?: string): string | null {
  const candidates = [
    ...(explicit ? [explicit] : []),
    ...(process.env.S4FORGE_BROWSER ? [process.env.S4FORGE_BROWSER] : []),
    ...BROWSER_CANDIDATES,
    ...BROWSER_CANDIDATES.map((name) => `/usr/bin/${name}`),
  ];
  for (const candidate of candidates) {
    if (candidate.includes("/")) {
      try {
        accessSync(candidate, constants.X_OK);
        return candidate;
      } catch {
        continue;
      }
    }
    for (const dir of (process.env.PATH ?? "").split(":")) {
      if (!dir) continue;
      try {
        accessSync(join(dir, candidate), constants.X_OK);
        return join(dir, candidate);
      } catch {
        continue;
      }
    }
  }
  return null;
}

export function toNavigableUrl(target: string): string {
  if (/^[a-z][a-z0-9+.-]*:/i.test(target)) return target;
  return pathToFileURL(resolve(target)).href;
}

export class Harvester {
  private constructor(
    private proc: ChildProcess,
    private connection: CdpConnection,
    private viewport: { width_px: number; height_px: number },
  ) {}

  static async launch(
    viewport: { width_px: number; height_px: number },
    browserPath?: string,
  ): Promise<Harvester> {
    const binary = findBrowser(browserPath);
    if (!binary) {
      throw new CdpError("no headless browser binary found (set S4FORGE_BROWSER or --browser)");
    }
    const userDataDir = join(tmpdir(), `s4forge-harvest-${process.pid}-${Date.now()}`);
    const { proc, connection } = await launchBrowser(binary, userDataDir, viewport);
    return new Harvester(proc, connection, viewport);
  }

  async capture(target: string, cfg: CaptureConfig): Promise<CaptureResult> {
    const url = toNavigableUrl(target);
    const { targetId } = await this.connection.send<{ targetId: string }>("Target.createTarget", {
      url: "about:blank",
    });
    const { sessionId } = await this.connection.send<{ sessionId: string }>(
      "Target.attachToTarget",
      { targetId, flatten: true },
    );
    try {
      await this.connection.send("Page.enable", {}, sessionId);
      await this.connection.send(
        "Emulation.setDeviceMetricsOverride",
        {
          width: cfg.viewport.width_px,
          height: cfg.viewport.height_px,
          deviceScaleFactor: 1,
          mobile: false,
        },
        sessionId,
      );

      const loaded = this.connection.waitFor("Page.loadEventFired", sessionId, cfg.navigationTimeoutMs);
      loaded.catch(() => {}); // surfaced via await below; avoid unhandled rejection on nav error
      const nav = await this.connection.send<{ errorText?: string }>(
        "Page.navigate",
        { url },
        sessionId,
      );
      if (nav.errorText) throw new RenderFailure(`navigation failed: ${nav.errorText}`);
      await loaded;
      await new Promise((r) => setTimeout(r, cfg.settleDelayMs));

      const evaluated = await this.connection.send<{
        result?: { value?: string };
        exceptionDetails?: { text?: string; exception?: { description?: string } };
      }>("Runtime.evaluate", { expression: EXTRACTION_SCRIPT, returnByValue: true }, sessionId);
      if (evaluated.exceptionDetails) {
        const detail =
          evaluated.exceptionDetails.exception?.description ?? evaluated.exceptionDetails.text;
        throw new RenderFailure(`extraction script failed: ${detail}`);
      }
      const payload = JSON.parse(evaluated.result?.value ?? "{}") as ExtractionPayload;
      if (!payload.nodes?.length || !payload.nodes.some((n) => n.tag === "body")) {
        throw new EmptyPage(`page has no body: ${url}`);
      }

      const snapshot = assembleSnapshot(url, payload, cfg.viewport);

      const shot = await this.connection.send<{ data: string }>(
        "Page.captureScreenshot",
        {
          format: "png",
          clip: {
            x: 0,
            y: 0,
            width: cfg.viewport.width_px,
            height: cfg.viewport.height_px,
            scale: 1,
          },
          captureBeyondViewport: false,
        },
        sessionId,
      );

      await mkdir(cfg.outputDir, { recursive: true });
      const snapshotPath = join(cfg.outputDir, `${snapshot.url_hash}.json`);
      const screenshotPath = join(cfg.outputDir, `${snapshot.url_hash}.png`);
      await writeFile(snapshotPath, JSON.stringify(snapshot, null, 1), "utf8");
      await writeFile(screenshotPath, Buffer.from(shot.data, "base64"));
      return { snapshotPath, screenshotPath, snapshot };
    } finally {
      await this.connection.send("Target.closeTarget", { targetId }).catch(() => {});
    }
  }

  async close(): Promise<void> {
    try {
      await this.connection.send("Browser.close");
    } catch {
      this.proc.kill();
    }
    this.connection.close();
  }
}

export { NavigationTimeout, RenderFailure, CdpError };
