"""The wire endpoint.

POST /segment takes {image_png_b64, text_prompt?, boxes?} and returns
{masks: [{png_b64, label, source, confidence}], thresholds}. Requests
the service cannot parse get 400; model mode without a loadable model
gets 503. Responses are plain JSON with no per-request state, so
identical requests produce identical bytes.
"""

from __future__ import annotations

import binascii
import threading
from numbers import Number

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from PIL import Image

from .config import SidecarConfig
from .masks import decode_image_b64
from .model import ModelBackend, ModelNotLoaded
from .stub import stub_masks


class MalformedRequest(ValueError):
    pass


def _validated(body) -> tuple[dict, Image.Image]:
    if not isinstance(body, dict):
        raise MalformedRequest("request body must be a JSON object")
    encoded = body.get("image_png_b64")
    if not isinstance(encoded, str) or not encoded:
        raise MalformedRequest("image_png_b64 must be a non-empty base64 string")
    try:
        image = decode_image_b64(encoded)
    except (binascii.Error, ValueError, OSError) as exc:
        raise MalformedRequest(f"image_png_b64 does not decode to an image: {exc}") from exc
    prompt = body.get("text_prompt")
    if prompt is not None and not isinstance(prompt, str):
        raise MalformedRequest("text_prompt must be a string")
    boxes = body.get("boxes")
    if boxes is not None:
        if not isinstance(boxes, list):
            raise MalformedRequest("boxes must be a list")
        for box in boxes:
            if (
                not isinstance(box, list)
                or len(box) != 4
                or not all(isinstance(v, Number) and not isinstance(v, bool) for v in box)
            ):
                raise MalformedRequest(f"each box needs 4 numbers, got {box!r}")
    if not prompt and not boxes:
        raise MalformedRequest("request needs a text prompt, boxes, or both")
    return body, image


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app(config: SidecarConfig | None = None) -> FastAPI:
    config = config or SidecarConfig()
    app = FastAPI(title="sam-sidecar", docs_url=None, redoc_url=None)
    app.state.config = config
    backend = ModelBackend(config) if config.mode == "model" else None
    inference_lock = threading.Lock()  # mask predictor is stateful across calls

    @app.post("/segment")
    async def segment(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "MalformedRequest", "request body is not valid JSON")
        try:
            body, image = _validated(body)
        except MalformedRequest as exc:
            return _error(400, "MalformedRequest", str(exc))

        width, height = image.size
        if backend is None:
            masks = stub_masks(body, width, height, config.fixture_dir)
        else:
            try:
                with inference_lock:
                    masks = backend.segment(
                        image, body.get("text_prompt"), body.get("boxes") or []
                    )
            except ModelNotLoaded as exc:
                return _error(503, "ModelNotLoaded", str(exc))
        return JSONResponse(
            content={"masks": masks, "thresholds": config.thresholds_json()}
        )

    return app
