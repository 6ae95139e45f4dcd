"""Deterministic stub backend.

A request is first looked up in the fixture directory by the SHA-256 of
its canonical JSON; a hit returns the canned masks unchanged (sized to
the request image if a fixture was recorded at another size). Misses
fall back to box-interior masks, or to an empty list when the request
carried only a text prompt the stub has no fixture for.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .masks import box_interior, encode_mask_b64, resize_mask_b64


def request_hash(body: dict) -> str:
    """Hash of the canonical request JSON; key order does not matter."""
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()


def load_fixture(fixture_dir: Path, body: dict) -> list[dict] | None:
    path = Path(fixture_dir) / f"{request_hash(body)}.json"
    if not path.is_file():
        return None
    return json.loads(path.read_text())["masks"]


def stub_masks(body: dict, width: int, height: int, fixture_dir: Path) -> list[dict]:
    canned = load_fixture(fixture_dir, body)
    if canned is not None:
        return [
            {**entry, "png_b64": resize_mask_b64(entry["png_b64"], width, height)}
            for entry in canned
        ]
    out = []
    for i, box in enumerate(body.get("boxes") or []):
        out.append(
            {
                "png_b64": encode_mask_b64(box_interior(tuple(box), width, height)),
                "label": f"box_{i}",
                "source": "box",
                "confidence": 1.0,
            }
        )
    return out
