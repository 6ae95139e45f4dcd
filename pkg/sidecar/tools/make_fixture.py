"""Regenerate the canned stub fixture.

Builds a small synthetic scene (one person-ish silhouette, one laptop),
writes the sample request for prompt "person, laptop", and stores the
two canned masks under the request's hash. Everything is deterministic,
so reruns are byte-identical.
"""

from __future__ import annotations

import base64
import io
import json
from pathlib import Path

import numpy as np
from PIL import Image

import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from sam_sidecar.masks import encode_mask_b64
from sam_sidecar.stub import request_hash

WIDTH, HEIGHT = 96, 72
FIXTURE_DIR = Path(__file__).resolve().parents[1] / "sam_sidecar" / "fixtures"


def person_mask() -> np.ndarray:
    mask = np.zeros((HEIGHT, WIDTH), bool)
    yy, xx = np.mgrid[0:HEIGHT, 0:WIDTH]
    head = ((xx - 26) ** 2 / 36 + (yy - 18) ** 2 / 49) <= 1.0
    torso = (xx >= 18) & (xx <= 34) & (yy >= 25) & (yy <= 58)
    return mask | head | torso


def laptop_mask() -> np.ndarray:
    yy, xx = np.mgrid[0:HEIGHT, 0:WIDTH]
    screen = (xx >= 52) & (xx <= 84) & (yy >= 28) & (yy <= 48)
    base = (xx >= 48) & (xx <= 88) & (yy >= 49) & (yy <= 54)
    return screen | base


def scene_png_b64() -> str:
    pixels = np.full((HEIGHT, WIDTH, 3), (235, 232, 226), np.uint8)
    pixels[person_mask()] = (92, 74, 66)
    pixels[laptop_mask()] = (58, 62, 70)
    buf = io.BytesIO()
    Image.fromarray(pixels).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def main() -> None:
    request = {"image_png_b64": scene_png_b64(), "text_prompt": "person, laptop"}
    masks = [
        {
            "png_b64": encode_mask_b64(person_mask()),
            "label": "person",
            "source": "text",
            "confidence": 0.92,
        },
        {
            "png_b64": encode_mask_b64(laptop_mask()),
            "label": "laptop",
            "source": "text",
            "confidence": 0.87,
        },
    ]
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    (FIXTURE_DIR / "person_laptop_request.json").write_text(json.dumps(request) + "\n")
    digest = request_hash(request)
    (FIXTURE_DIR / f"{digest}.json").write_text(json.dumps({"masks": masks}, indent=1) + "\n")
    print(f"wrote fixture {digest}.json ({WIDTH}x{HEIGHT}, 2 masks)")


if __name__ == "__main__":
    main()
