"""Segmentation providers.

Object masks can come from a directory of prepared mask files, from the
plain box-interior fallback, or from a separate segmentation sidecar
spoken to over HTTP. Providers are interchangeable: each takes a
request and returns masks at the request image's dimensions. Text- and
box-derived masks are merged into a single list, text first, no
deduplication.
"""

from __future__ import annotations

import base64
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx
import numpy as np
from PIL import Image

from .errors import NoDetections, ProviderUnavailable
from .geometry import BoundingBox
from .imagecore import ImageBuffer, encode_png

FOREGROUND_LEVEL = 128  # grayscale mask pixels at or above this are foreground
DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class SegmentationRequest:
    image: ImageBuffer
    text_prompt: str | None = None
    boxes: tuple[BoundingBox, ...] = ()

    def __post_init__(self) -> None:
        if not self.text_prompt and not self.boxes:
            raise ValueError("request needs a text prompt, boxes, or both")


@dataclass(frozen=True)
class SegmentationMask:
    mask: np.ndarray  # (h, w) bool
    label: str
    source: str  # "text" | "box"
    confidence: float


@dataclass(frozen=True)
class SegmentationResult:
    masks: tuple[SegmentationMask, ...]
    provider: str


class SegmentationProvider(Protocol):
    name: str

    def segment(self, request: SegmentationRequest) -> SegmentationResult: ...


def merge_box_sources(
    text_masks: list[SegmentationMask], box_masks: list[SegmentationMask]
) -> list[SegmentationMask]:
    """Concatenate text-derived then box-derived masks, tags preserved."""
    return list(text_masks) + list(box_masks)


def box_interior_mask(box: BoundingBox, width: int, height: int) -> np.ndarray:
    """Pixel is included iff its center lies inside the box."""
    cx = (np.arange(width) + 0.5) / width
    cy = (np.arange(height) + 0.5) / height
    xs = (cx >= box.x_min) & (cx <= box.x_max)
    ys = (cy >= box.y_min) & (cy <= box.y_max)
    return ys[:, None] & xs[None, :]


def _box_masks(request: SegmentationRequest) -> list[SegmentationMask]:
    out = []
    for i, box in enumerate(request.boxes):
        out.append(
            SegmentationMask(
                mask=box_interior_mask(box, request.image.width, request.image.height),
                label=f"box_{i}",
                source="box",
                confidence=1.0,
            )
        )
    return out


class BoxFallbackProvider:
    """No model at all: every box becomes its own interior mask.

    Weaker than real segmentation and labeled as such in responses; a
    text prompt alone yields nothing here.
    """

    name = "box_fallback"

    def segment(self, request: SegmentationRequest) -> SegmentationResult:
        masks = merge_box_sources([], _box_masks(request))
        if not masks:
            raise NoDetections("box fallback has no boxes to work with")
        return SegmentationResult(masks=tuple(masks), provider=self.name)


class FileProvider:
    """Masks prepared on disk: one grayscale <label>.png per object.

    Pixels at or above 128 are foreground. Files stand in for the text
    path; request boxes still contribute interior masks.
    """

    name = "file"

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def segment(self, request: SegmentationRequest) -> SegmentationResult:
        text_masks: list[SegmentationMask] = []
        if request.text_prompt:
            for path in sorted(self.directory.glob("*.png")):
                img = Image.open(path).convert("L")
                if img.size != (request.image.width, request.image.height):
                    img = img.resize(
                        (request.image.width, request.image.height), Image.NEAREST
                    )
                arr = np.asarray(img) >= FOREGROUND_LEVEL
                text_masks.append(
                    SegmentationMask(
                        mask=arr, label=path.stem, source="text", confidence=1.0
                    )
                )
        masks = merge_box_sources(text_masks, _box_masks(request))
        if not masks:
            raise NoDetections(f"nothing matched under {self.directory}")
        return SegmentationResult(masks=tuple(masks), provider=self.name)


class SidecarProvider:
    """HTTP client for the segmentation sidecar's /segment endpoint."""

    name = "sidecar"

    def __init__(self, base_url: str, timeout: float = DEFAULT_TIMEOUT):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def segment(self, request: SegmentationRequest) -> SegmentationResult:
        payload: dict = {
            "image_png_b64": base64.b64encode(encode_png(request.image)).decode("ascii")
        }
        if request.text_prompt:
            payload["text_prompt"] = request.text_prompt
        if request.boxes:
            payload["boxes"] = [list(b.as_tuple()) for b in request.boxes]
        try:
            resp = httpx.post(
                f"{self.base_url}/segment", json=payload, timeout=self.timeout
            )
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"sidecar unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"sidecar returned {resp.status_code}: {resp.text[:200]}"
            )
        masks = []
        try:
            body = resp.json()
            entries = body["masks"]
            for entry in entries:
                raw = base64.b64decode(entry["png_b64"])
                img = Image.open(io.BytesIO(raw)).convert("L")
                if img.size != (request.image.width, request.image.height):
                    img = img.resize(
                        (request.image.width, request.image.height), Image.NEAREST
                    )
                masks.append(
                    SegmentationMask(
                        mask=np.asarray(img) >= FOREGROUND_LEVEL,
                        label=str(entry.get("label", f"mask_{len(masks)}")),
                        source=str(entry.get("source", "text")),
                        confidence=float(entry.get("confidence", 0.0)),
                    )
                )
        except Exception as exc:
            raise ProviderUnavailable(f"malformed sidecar response: {exc}") from exc
        if not masks:
            raise NoDetections("sidecar found nothing for this request")
        return SegmentationResult(masks=tuple(masks), provider=self.name)


def segment(
    request: SegmentationRequest, provider: SegmentationProvider
) -> SegmentationResult:
    """Run a provider and enforce the shared mask contract."""
    result = provider.segment(request)
    shape = (request.image.height, request.image.width)
    for m in result.masks:
        if m.mask.shape != shape:
            raise ProviderUnavailable(
                f"provider {result.provider!r} returned mask {m.mask.shape}, expected {shape}"
            )
    return result


def make_provider(
    kind: str,
    path: str | None = None,
    url: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> SegmentationProvider:
    if kind == "box":
        return BoxFallbackProvider()
    if kind == "file":
        if not path:
            raise ValueError("file provider needs a directory path")
        return FileProvider(path)
    if kind == "sidecar":
        if not url:
            raise ValueError("sidecar provider needs a base url")
        return SidecarProvider(url, timeout=timeout)
    raise ValueError(f"unknown provider kind {kind!r}")
