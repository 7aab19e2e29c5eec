/** Wire-format types shared with the Python consumer (docs/snapshot-format.md). */

export type NodeKind = "text" | "image" | "table" | "input" | "other";

export interface WireWord {
  text: string;
  bbox: [number, number, number, number];
}

export interface WireNode {
  id: number;
  parent_id: number | null;
  child_ids: number[];
  tag: string;
  kind: NodeKind;
  attributes: Record<string, string>;
  bbox: [number, number, number, number] | null;
  css_visible: boolean;
  hit_target_id: number | null;
  words: WireWord[];
  xpath: string;
}

export interface WireSnapshot {
  url: string;
  url_hash: string;
  viewport: { width_px: number; height_px: number };
  root_id: number;
  document_title: string;
  screenshot_ref: string;
  nodes: WireNode[];
}

export const ATTRIBUTE_WHITELIST = ["class", "id", "label", "for", "alt", "title", "type"] as const;

/** Raw record produced by the in-page extraction script, one per node. */
export interface RawNode {
  id: number;
  parentId: number | null;
  tag: string;
  isText: boolean;
  attributes: Record<string, string>;
  rect: [number, number, number, number] | null;
  cssVisible: boolean;
  hitId: number | null;
  words: { text: string; rect: [number, number, number, number] }[];
  title?: string;
}

export interface ExtractionPayload {
  title: string;
  nodes: RawNode[];
}
