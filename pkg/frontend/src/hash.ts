/**
 * URL normalization and 64-bit digests.
 *
 * Must agree byte-for-byte with the Python consumer, which recomputes the
 * digest during validation: lowercase scheme and host (credentials keep
 * their case), strip the fragment, leave path/query untouched, then take
 * the first 8 bytes of SHA-256 as 16 hex chars. The native URL class is
 * deliberately avoided because it rewrites empty paths.
 */

import { createHash } from "node:crypto";

const SPLIT_RE = /^([a-zA-Z][a-zA-Z0-9+.-]*):(\/\/([^/?#]*))?([^?#]*)(?:\?([^#]*))?(?:#.*)?$/;

export function normalizeUrl(url: string): string {
  const trimmed = url.trim();
  const m = SPLIT_RE.exec(trimmed);
  if (!m) {
    const hashIdx = trimmed.indexOf("#");
    return hashIdx === -1 ? trimmed : trimmed.slice(0, hashIdx);
  }
  const scheme = m[1].toLowerCase();
  const hasAuthority = m[2] !== undefined;
  let netloc = m[3] ?? "";
  const at = netloc.lastIndexOf("@");
  if (at !== -1) {
    netloc = netloc.slice(0, at + 1) + netloc.slice(at + 1).toLowerCase();
  } else {
    netloc = netloc.toLowerCase();
  }
  const path = m[4] ?? "";
  const query = m[5];
  let out = scheme + ":";
  if (hasAuthority) out += "//" + netloc;
  out += path;
  if (query) out += "?" + query; // a bare trailing "?" is dropped, like urlunsplit
  return out;
}

export function urlHash(url: string): string {
  return createHash("sha256").update(normalizeUrl(url), "utf8").digest().subarray(0, 8).toString("hex");
}
