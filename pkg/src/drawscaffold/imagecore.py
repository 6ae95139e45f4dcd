"""Raster plumbing: image buffers, sRGB/CIELAB/HSV conversion, value maps,
blur filters, and masked recoloring.

All conversions use the D65 white point and the standard sRGB transfer
function. The white point is taken from the forward matrix row sums so that
pure white maps to exactly L*=100, a*=0, b*=0.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import cv2
import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import (
    BadImage,
    DimensionMismatch,
    InvalidKernel,
    TooLarge,
)

# sRGB (linear) -> XYZ, D65. Row sums define the reference white so the
# round trip through white is exact.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE = _RGB_TO_XYZ.sum(axis=1)

_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0

MAX_PIXELS = 32_000_000

# Blur kernel sizes are accepted on this closed range.
KERNEL_MIN = 1.5
KERNEL_MAX = 4.9

BILATERAL_RANGE_SIGMA = 25.0  # fixed range sigma, 8-bit units

FILTERS = ("gaussian", "bilateral", "median")


@dataclass(frozen=True)
class LabColor:
    l: float
    a: float
    b: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l, self.a, self.b)


@dataclass(frozen=True)
class HsvColor:
    h: float  # degrees, [0, 360)
    s: float  # [0, 1]
    v: float  # [0, 1]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.h, self.s, self.v)


@dataclass(frozen=True)
class BlurSpec:
    filter: str
    kernel_size: float

    def __post_init__(self) -> None:
        if self.filter not in FILTERS:
            raise InvalidKernel(f"unknown filter {self.filter!r}")
        if not (KERNEL_MIN <= self.kernel_size <= KERNEL_MAX):
            raise InvalidKernel(
                f"kernel_size {self.kernel_size} outside [{KERNEL_MIN}, {KERNEL_MAX}]"
            )


class ImageBuffer:
    """Immutable 8-bit sRGB raster. ``pixels`` is an (h, w, 3) uint8 array."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise BadImage(f"expected (h, w, 3) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise BadImage("image must be at least 1x1")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("ImageBuffer is immutable")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, ImageBuffer) and np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"ImageBuffer({self.width}x{self.height})"


def new_filled(width: int, height: int, rgb: tuple[int, int, int]) -> ImageBuffer:
    arr = np.empty((height, width, 3), np.uint8)
    arr[:] = rgb
    return ImageBuffer(arr)


def decode_png(data: bytes, max_pixels: int = MAX_PIXELS) -> ImageBuffer:
    """Decode PNG bytes; alpha is composited over white."""
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise BadImage(f"undecodable image: {exc}") from exc
    w, h = img.size
    if w * h > max_pixels:
        raise TooLarge(f"{w}x{h} exceeds {max_pixels} pixels")
    if img.mode in ("RGBA", "LA", "PA") or (img.mode == "P" and "transparency" in img.info):
        rgba = img.convert("RGBA")
        base = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
        img = Image.alpha_composite(base, rgba).convert("RGB")
    else:
        img = img.convert("RGB")
    return ImageBuffer(np.asarray(img))


def encode_png(img: ImageBuffer) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.asarray(img.pixels)).save(buf, format="PNG")
    return buf.getvalue()


def load_png(path) -> ImageBuffer:
    with open(path, "rb") as fh:
        return decode_png(fh.read())


def save_png(img: ImageBuffer, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(img))


# ---------------------------------------------------------------------------
# color conversion (vectorized on trailing axis of size 3)


def srgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """sRGB in [0, 255] (any shape ending in 3) -> CIELAB float array."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)
    xyz = lin @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _LAB_EPS, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)
    out = np.empty_like(f)
    out[..., 0] = 116.0 * f[..., 1] - 16.0
    out[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    out[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return out


def lab_to_srgb(lab: np.ndarray) -> np.ndarray:
    """CIELAB -> sRGB floats clipped to [0, 255]. Round for display."""
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    f3 = f**3
    t = np.where(f3 > _LAB_EPS, f3, (116.0 * f - 16.0) / _LAB_KAPPA)
    xyz = t * _WHITE
    lin = xyz @ _XYZ_TO_RGB.T
    c = np.where(lin > 0.0031308, 1.055 * np.clip(lin, 0, None) ** (1 / 2.4) - 0.055, 12.92 * lin)
    return np.clip(c * 255.0, 0.0, 255.0)


def srgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """sRGB in [0, 255] -> HSV with hue in degrees [0, 360), s and v in [0, 1]."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    r, g, b = c[..., 0], c[..., 1], c[..., 2]
    v = c.max(axis=-1)
    delta = v - c.min(axis=-1)
    s = np.divide(delta, v, out=np.zeros_like(v), where=v > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        hr = (g - b) / delta
        hg = (b - r) / delta + 2.0
        hb = (r - g) / delta + 4.0
    h = np.select([v == r, v == g], [hr, hg], default=hb)
    h = np.where(delta == 0, 0.0, h) * 60.0
    h = np.mod(h, 360.0)
    return np.stack([h, s, v], axis=-1)


def hsv_to_srgb(hsv: np.ndarray) -> np.ndarray:
    """HSV (degrees, [0,1], [0,1]) -> sRGB floats in [0, 255]."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h = np.mod(hsv[..., 0], 360.0) / 60.0
    s, v = hsv[..., 1], hsv[..., 2]
    i = np.floor(h).astype(int) % 6
    f = h - np.floor(h)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1) * 255.0


def convert_color(rgb: tuple[int, int, int], target: str):
    """Single sRGB triple -> :class:`LabColor` or :class:`HsvColor`."""
    arr = np.asarray(rgb, dtype=np.float64)
    if target == "lab":
        l, a, b = srgb_to_lab(arr)
        return LabColor(float(l), float(a), float(b))
    if target == "hsv":
        h, s, v = srgb_to_hsv(arr)
        return HsvColor(float(h), float(s), float(v))
    raise ValueError(f"unknown target {target!r}")


def lab_to_rgb8(lab: LabColor) -> tuple[int, int, int]:
    r, g, b = np.rint(lab_to_srgb(np.asarray(lab.as_tuple())))
    return (int(r), int(g), int(b))


def hsv_to_rgb8(hsv: HsvColor) -> tuple[int, int, int]:
    r, g, b = np.rint(hsv_to_srgb(np.asarray(hsv.as_tuple())))
    return (int(r), int(g), int(b))


# ---------------------------------------------------------------------------
# value map, blur, recolor


def to_value_image(img: ImageBuffer) -> ImageBuffer:
    """Grayscale rendering of lightness: g = round(255 * L* / 100)."""
    lab_l = srgb_to_lab(img.pixels)[..., 0]
    g = np.clip(np.rint(lab_l * 255.0 / 100.0), 0, 255).astype(np.uint8)
    return ImageBuffer(np.repeat(g[..., None], 3, axis=2))


def _odd_window(kernel_size: float) -> int:
    # smallest odd integer >= 2 * kernel_size + 1
    w = int(np.ceil(2.0 * kernel_size + 1.0))
    return w if w % 2 == 1 else w + 1


def apply_blur(img: ImageBuffer, spec: BlurSpec) -> ImageBuffer:
    """Blur with clamp-to-edge borders.

    gaussian: kernel_size is the sigma, window 2*ceil(3*sigma)+1.
    median/bilateral: window is the nearest odd integer >= 2*kernel_size+1.
    """
    px = img.pixels
    if spec.filter == "gaussian":
        sigma = spec.kernel_size
        radius = int(np.ceil(3.0 * sigma))
        x = np.arange(-radius, radius + 1, dtype=np.float64)
        kernel = np.exp(-(x**2) / (2.0 * sigma * sigma))
        kernel /= kernel.sum()
        acc = px.astype(np.float64)
        acc = ndimage.correlate1d(acc, kernel, axis=0, mode="nearest")
        acc = ndimage.correlate1d(acc, kernel, axis=1, mode="nearest")
        out = np.clip(np.rint(acc), 0, 255).astype(np.uint8)
    elif spec.filter == "median":
        w = _odd_window(spec.kernel_size)
        out = ndimage.median_filter(px, size=(w, w, 1), mode="nearest")
    else:  # bilateral
        w = _odd_window(spec.kernel_size)
        out = cv2.bilateralFilter(
            np.ascontiguousarray(px),
            d=w,
            sigmaColor=BILATERAL_RANGE_SIGMA,
            sigmaSpace=float(spec.kernel_size),
            borderType=cv2.BORDER_REPLICATE,
        )
    return ImageBuffer(out)


def recolor_region(img: ImageBuffer, mask: np.ndarray, hue: float, saturation: float) -> ImageBuffer:
    """Set hue and saturation of masked pixels, keeping each pixel's V."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (img.height, img.width):
        raise DimensionMismatch(
            f"mask {mask.shape} vs image {(img.height, img.width)}"
        )
    out = np.array(img.pixels, copy=True)
    if not mask.any():
        return ImageBuffer(out)
    sel = img.pixels[mask].astype(np.float64)
    v = sel.max(axis=1) / 255.0
    hsv = np.empty((len(sel), 3))
    hsv[:, 0] = hue
    hsv[:, 1] = saturation
    hsv[:, 2] = v
    out[mask] = np.clip(np.rint(hsv_to_srgb(hsv)), 0, 255).astype(np.uint8)
    return ImageBuffer(out)


def letterbox_to(img: ImageBuffer, width: int, height: int) -> ImageBuffer:
    """Bilinear resize to (width, height); pads with white to preserve aspect."""
    if img.width == width and img.height == height:
        return img
    scale = min(width / img.width, height / img.height)
    new_w = max(1, int(round(img.width * scale)))
    new_h = max(1, int(round(img.height * scale)))
    resized = cv2.resize(
        np.ascontiguousarray(img.pixels), (new_w, new_h), interpolation=cv2.INTER_LINEAR
    )
    if new_w == width and new_h == height:
        return ImageBuffer(resized)
    canvas = np.full((height, width, 3), 255, np.uint8)
    x0 = (width - new_w) // 2
    y0 = (height - new_h) // 2
    canvas[y0 : y0 + new_h, x0 : x0 + new_w] = resized
    return ImageBuffer(canvas)
