"""Stable URL digests and seed derivation.

Digests must be reproducible across runs and across the Python and
TypeScript sides of the pipeline, so everything is built on SHA-256
rather than process-seeded hashing.
"""

from __future__ import annotations

import hashlib
from urllib.parse import urlsplit, urlunsplit

HASH_HEX_LEN = 16  # 64 bits


def normalize_url(url: str) -> str:
    """Lowercase scheme and host, strip the fragment; path/query untouched."""
    parts = urlsplit(url.strip())
    netloc = parts.netloc
    if "@" in netloc:
        creds, _, host = netloc.rpartition("@")
        netloc = creds + "@" + host.lower()
    else:
        netloc = netloc.lower()
    return urlunsplit((parts.scheme.lower(), netloc, parts.path, parts.query, ""))


def url_hash(url: str) -> str:
    """64-bit digest of the normalized URL as 16 lowercase hex chars."""
    digest = hashlib.sha256(normalize_url(url).encode("utf-8")).digest()
    return digest[:8].hex()


def derive_seed(corpus_seed: int, url_hash_hex: str, index: int = 0) -> int:
    """Per-page (or per-sample) 63-bit seed, independent of scheduling order."""
    material = corpus_seed.to_bytes(8, "big", signed=True) + bytes.fromhex(url_hash_hex)
    material += index.to_bytes(4, "big")
    digest = hashlib.sha256(material).digest()
    return int.from_bytes(digest[:8], "big") >> 1
