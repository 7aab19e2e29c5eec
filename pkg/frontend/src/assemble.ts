/**
 * Turn a raw in-page extraction payload into the wire-format document the
 * Python pipeline validates. Pure and synchronous, so it is unit-testable
 * without a browser.
 */

import { urlHash } from "./hash.js";
import {
  ATTRIBUTE_WHITELIST,
  ExtractionPayload,
  NodeKind,
  RawNode,
  WireNode,
  WireSnapshot,
} from "./wire.js";

const INPUT_TAGS = new Set(["input", "textarea", "select"]);

function kindOf(raw: RawNode): NodeKind {
  if (raw.isText) return "text";
  if (raw.tag === "img") return "image";
  if (raw.tag === "table") return "table";
  if (INPUT_TAGS.has(raw.tag)) return "input";
  return "other";
}

function whitelistAttributes(attrs: Record<string, string>): Record<string, string> {
  const out: Record<string, string> = {};
  for (const name of ATTRIBUTE_WHITELIST) {
    if (typeof attrs[name] === "string") out[name] = attrs[name];
  }
  return out;
}

export class AssembleError extends Error {}

export function assembleSnapshot(
  url: string,
  payload: ExtractionPayload,
  viewport: { width_px: number; height_px: number },
): WireSnapshot {
  const byId = new Map<number, RawNode>();
  for (const raw of payload.nodes) {
    if (byId.has(raw.id)) throw new AssembleError(`duplicate raw node id ${raw.id}`);
    byId.set(raw.id, raw);
  }

  const childIds = new Map<number, number[]>();
  let rootId: number | null = null;
  for (const raw of payload.nodes) {
    if (raw.parentId === null) {
      if (rootId !== null) throw new AssembleError("two roots in extraction payload");
      rootId = raw.id;
      continue;
    }
    if (!byId.has(raw.parentId)) throw new AssembleError(`node ${raw.id} has unknown parent`);
    const siblings = childIds.get(raw.parentId) ?? [];
    siblings.push(raw.id);
    childIds.set(raw.parentId, siblings);
  }
  if (rootId === null) throw new AssembleError("extraction payload has no root");

  // Root-to-node tag paths with indices counted among same-tag siblings.
  const xpaths = new Map<number, string>();
  const assignPaths = (id: number, prefix: string) => {
    const raw = byId.get(id)!;
    const parentChildren = raw.parentId === null ? [id] : childIds.get(raw.parentId)!;
    let index = 0;
    for (const sib of parentChildren) {
      if (sib === id) break;
      if (byId.get(sib)!.tag === raw.tag) index += 1;
    }
    const path = `${prefix}/${raw.tag}[${index}]`;
    xpaths.set(id, path);
    for (const child of childIds.get(id) ?? []) assignPaths(child, path);
  };
  assignPaths(rootId, "");

  const nodes: WireNode[] = payload.nodes.map((raw) => {
    const words = raw.isText
      ? raw.words.map((w) => ({ text: w.text, bbox: w.rect }))
      : [];
    if (raw.isText && words.length === 0) {
      throw new AssembleError(`text node ${raw.id} has no measurable words`);
    }
    let hit = raw.hitId;
    if (hit !== null && !byId.has(hit)) hit = null;
    return {
      id: raw.id,
      parent_id: raw.parentId,
      child_ids: childIds.get(raw.id) ?? [],
      tag: raw.tag.toLowerCase(),
      kind: kindOf(raw),
      attributes: whitelistAttributes(raw.attributes),
      bbox: raw.rect,
      css_visible: raw.cssVisible,
      hit_target_id: hit,
      words,
      xpath: xpaths.get(raw.id)!,
    };
  });

  const hash = urlHash(url);
  return {
    url,
    url_hash: hash,
    viewport,
    root_id: rootId,
    document_title: payload.title,
    screenshot_ref: `${hash}.png`,
    nodes,
  };
}
