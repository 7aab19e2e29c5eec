"""Coordinate-token quantization and the box/OCR target formats.

1000 discrete tokens index positions 0..999; a pixel coordinate is
normalized against its viewport extent and floored, with the extent
itself clamping to the top token. Tokens serialize literally as "<k>".
"""

from __future__ import annotations

import re

from .errors import BadExtent
from .geometry import BBox, Viewport

NUM_COORD_TOKENS = 1000
_TOKEN_RE = re.compile(r"<(\d{1,3})>")
_OCR_PAIR_RE = re.compile(r"(.+?)<(\d{1,3})><(\d{1,3})><(\d{1,3})><(\d{1,3})>")


def quantize_coord(v: float, extent: float) -> int:
    """min(floor(clamp(v, 0, extent) / extent * 1000), 999).

    Multiplying before dividing keeps exact-integer quotients exact, so
    the floor never lands one cell low on grid-aligned inputs.
    """
    if extent <= 0:
        raise BadExtent(f"extent must be positive, got {extent}")
    clamped = min(max(v, 0.0), extent)
    return min(int((clamped * NUM_COORD_TOKENS) / extent), NUM_COORD_TOKENS - 1)


def dequantize_coord(token: int, extent: float) -> float:
    """Center of the token's quantization cell, in pixels."""
    return (token + 0.5) * extent / NUM_COORD_TOKENS


def coord_token_str(token: int) -> str:
    if not 0 <= token < NUM_COORD_TOKENS:
        raise ValueError(f"coordinate token {token} out of range")
    return f"<{token}>"


def bbox_tokens(b: BBox, vp: Viewport) -> str:
    """Four tokens <x><y><x><y>: x against width, y against height."""
    return "".join(
        coord_token_str(t)
        for t in (
            quantize_coord(b.x_min, vp.width_px),
            quantize_coord(b.y_min, vp.height_px),
            quantize_coord(b.x_max, vp.width_px),
            quantize_coord(b.y_max, vp.height_px),
        )
    )


def parse_coord_tokens(text: str) -> list[int]:
    """All coordinate tokens appearing in *text*, in order."""
    return [int(m.group(1)) for m in _TOKEN_RE.finditer(text)]


def parse_ocr_target(text: str) -> list[tuple[str, tuple[int, int, int, int]]]:
    """Inverse of the OCR target format: (word, 4 tokens) pairs.

    Exact inverse as long as word text contains no coordinate-token
    substring of its own, which holds for all bundled corpora.
    """
    pairs = []
    pos = 0
    while pos < len(text):
        m = _OCR_PAIR_RE.match(text, pos)
        if m is None:
            raise ValueError(f"unparseable OCR target at offset {pos}: {text[pos:pos + 40]!r}")
        pairs.append((m.group(1), (int(m.group(2)), int(m.group(3)), int(m.group(4)), int(m.group(5)))))
        pos = m.end()
    return pairs
