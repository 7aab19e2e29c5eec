#!/usr/bin/env node
/**
 * harvest --input urls.txt --out DIR --viewport 1280x1280 --timeout-ms 30000
 *
 * Targets may also be given as positional arguments (URLs or local HTML
 * paths). Output: <url_hash>.json and <url_hash>.png per page.
 */

import { readFileSync } from "node:fs";

import { captureBatch } from "./batch.js";
import { DEFAULT_CONFIG, Harvester, type CaptureConfig } from "./capture.js";

interface CliArgs {
  input?: string;
  out: string;
  viewport: { width_px: number; height_px: number };
  timeoutMs: number;
  settleMs: number;
  browser?: string;
  targets: string[];
}

function parseViewport(text: string): { width_px: number; height_px: number } {
  const m = /^(\d+)x(\d+)$/i.exec(text);
  if (!m) throw new Error(`viewport must look like 1280x1280, got ${text}`);
  return { width_px: Number(m[1]), height_px: Number(m[2]) };
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = {
    out: "harvested",
    viewport: { ...DEFAULT_CONFIG.viewport },
    timeoutMs: DEFAULT_CONFIG.navigationTimeoutMs,
    settleMs: DEFAULT_CONFIG.settleDelayMs,
    targets: [],
  };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${arg}`);
      return argv[i];
    };
    switch (arg) {
      case "--input":
        args.input = next();
        break;
      case "--out":
        args.out = next();
        break;
      case "--viewport":
        args.viewport = parseViewport(next());
        break;
      case "--timeout-ms":
        args.timeoutMs = Number(next());
        break;
      case "--settle-ms":
        args.settleMs = Number(next());
        break;
      case "--browser":
        args.browser = next();
        break;
      default:
        if (arg.startsWith("--")) throw new Error(`unknown flag ${arg}`);
        args.targets.push(arg);
    }
  }
  if (args.timeoutMs <= 0 || args.settleMs < 0) throw new Error("timeouts must be positive");
  return args;
}

export function readTargets(args: CliArgs): string[] {
  const targets = [...args.targets];
  if (args.input) {
    for (const line of readFileSync(args.input, "utf8").split("\n")) {
      const trimmed = line.trim();
      if (trimmed && !trimmed.startsWith("#")) targets.push(trimmed);
    }
  }
  return targets;
}

async function main(): Promise<number> {
  let args: CliArgs;
  let targets: string[];
  try {
    args = parseArgs(process.argv.slice(2));
    targets = readTargets(args);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
  if (!targets.length) {
    console.error("no targets (use --input urls.txt or positional urls)");
    return 1;
  }

  const cfg: CaptureConfig = {
    viewport: args.viewport,
    navigationTimeoutMs: args.timeoutMs,
    settleDelayMs: args.settleMs,
    outputDir: args.out,
  };
  const harvester = await Harvester.launch(cfg.viewport, args.browser);
  try {
    const summary = await captureBatch(targets, async (target) => {
      const result = await harvester.capture(target, cfg);
      console.log(`ok ${target} -> ${result.snapshotPath}`);
    });
    for (const failure of summary.failed) {
      console.error(`failed ${failure.target}: ${failure.error}`);
    }
    console.log(`captured ${summary.ok_count}/${targets.length}`);
    return summary.ok_count > 0 ? 0 : 1;
  } finally {
    await harvester.close();
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main().then(
    (code) => process.exit(code),
    (err) => {
      console.error(err instanceof Error ? err.stack : String(err));
      process.exit(1);
    },
  );
}
