"""Mask rasters and their wire encoding.

Masks travel as base64 grayscale PNGs, foreground 255 / background 0.
Clients threshold at 128, so the two levels survive any lossless round
trip with margin.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image


def box_interior(box: tuple[float, float, float, float], width: int, height: int) -> np.ndarray:
    """Pixel is included iff its center lies inside the normalized box."""
    x0, y0, x1, y1 = box
    cx = (np.arange(width) + 0.5) / width
    cy = (np.arange(height) + 0.5) / height
    xs = (cx >= x0) & (cx <= x1)
    ys = (cy >= y0) & (cy <= y1)
    return ys[:, None] & xs[None, :]


def encode_mask_b64(mask: np.ndarray) -> str:
    img = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def decode_image_b64(data: str) -> Image.Image:
    raw = base64.b64decode(data, validate=True)
    img = Image.open(io.BytesIO(raw))
    img.load()
    return img


def resize_mask_b64(png_b64: str, width: int, height: int) -> str:
    """Re-encode a mask PNG at the given size; unchanged if it already fits."""
    img = decode_image_b64(png_b64).convert("L")
    if img.size == (width, height):
        return png_b64
    resized = img.resize((width, height), Image.NEAREST)
    buf = io.BytesIO()
    resized.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")
