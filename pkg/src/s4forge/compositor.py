"""Apply render directives to the screenshot raster.

Masks are solid white fills (lossless PNG keeps them exact); outlines are
3px strokes, red for the primary style and blue for the secondary one
used by node-relation samples. Directives land in order, so later pixels
win inside overlaps. The source image is never modified.
"""

from __future__ import annotations

import io
from typing import Iterable, Mapping

from PIL import Image, ImageDraw

from .errors import BadRect
from .geometry import BBox, Viewport
from .taskgen import DirectiveOp, RenderDirective

OUTLINE_WIDTH = 3
MASK_COLOR = (255, 255, 255)
OUTLINE_COLORS = {
    "primary": (255, 0, 0),
    "secondary": (0, 0, 255),
}

Color = tuple[int, int, int]


def _pixel_rect(rect: BBox, width: int, height: int) -> tuple[int, int, int, int]:
    clipped = rect.clip(Viewport(width, height))
    if clipped.width <= 0 or clipped.height <= 0:
        raise BadRect(f"degenerate rect after clipping: {rect}")
    x0, y0 = int(clipped.x_min), int(clipped.y_min)
    # Sub-pixel but non-empty rects still paint one pixel; PIL boxes are
    # corner-inclusive.
    x1 = max(int(round(clipped.x_max)), x0 + 1)
    y1 = max(int(round(clipped.y_max)), y0 + 1)
    return x0, y0, min(x1, width) - 1, min(y1, height) - 1


def apply_directives(
    img: Image.Image,
    directives: Iterable[RenderDirective],
    *,
    mask_color: Color = MASK_COLOR,
    outline_colors: Mapping[str, Color] = OUTLINE_COLORS,
    outline_width: int = OUTLINE_WIDTH,
) -> Image.Image:
    """Return a new RGB image with all directives drawn, in order."""
    out = img.convert("RGB")
    if out is img:
        out = img.copy()
    draw = ImageDraw.Draw(out)
    for directive in directives:
        box = _pixel_rect(directive.rect, out.width, out.height)
        if directive.op is DirectiveOp.MASK_RECT:
            draw.rectangle(box, fill=mask_color)
        else:
            color = outline_colors.get(directive.style, OUTLINE_COLORS["primary"])
            draw.rectangle(box, outline=color, width=outline_width)
    return out


def encode_png(img: Image.Image) -> bytes:
    """Deterministic PNG bytes for the composited image."""
    buf = io.BytesIO()
    img.save(buf, format="PNG", optimize=False)
    return buf.getvalue()
