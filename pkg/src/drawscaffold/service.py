"""HTTP service.

Every pipeline is exposed under /v1 against an uploaded reference
image. Responses embed the session config that produced them, so a
payload can be replayed verbatim. Reads share a per-session lock;
canvas uploads, recolors, and config changes take it exclusively.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from fastapi import APIRouter, FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool

from .composition import lines_to_json
from .config import AppConfig
from .errors import (
    BadImage,
    DegeneratePolygon,
    NoCanvas,
    ProviderUnavailable,
    ScaffoldError,
    TooLarge,
    UnknownSession,
)
from .geometry import BoundingBox, GridSpec, generate_grid
from .imagecore import (
    BlurSpec,
    apply_blur,
    decode_png,
    encode_png,
    letterbox_to,
    recolor_region,
    to_value_image,
)
from .matching import match_palettes
from .palette import extract_dominant, isolate_color_preview
from .pipeline import compose_scaffold
from .segmentation import SegmentationRequest, make_provider, segment
from .sessions import Session, SessionStore

_STATUS_BY_ERROR = (
    (UnknownSession, 404),
    (BadImage, 400),
    (TooLarge, 413),
    (NoCanvas, 409),
    (ProviderUnavailable, 502),
)


class CompositionBody(BaseModel):
    prompt: str | None = None
    boxes: list[list[float]] | None = None
    epsilon: float | None = None
    seed: int | None = None


class RecolorBody(BaseModel):
    lasso: list[list[float]]
    hue: float
    saturation: float


class ConfigPatch(BaseModel):
    epsilon: float | None = None
    k_lines: int | None = None
    palette_k: int | None = None
    ransac: dict | None = None
    blur: dict | None = None
    tolerances: dict | None = None


def _parse_boxes(raw: list[list[float]] | None) -> tuple[BoundingBox, ...]:
    boxes = []
    for b in raw or []:
        if len(b) != 4:
            raise ValueError(f"box needs 4 coordinates, got {len(b)}")
        if not all(0.0 <= v <= 1.0 for v in b):
            raise ValueError(f"box {b} outside the unit square")
        boxes.append(BoundingBox(b[0], b[1], b[2], b[3]))
    return tuple(boxes)


def rasterize_lasso(points: np.ndarray, width: int, height: int) -> np.ndarray:
    """Even-odd fill of a normalized closed polyline at pixel resolution."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x1 = pts[:, 0] * max(width - 1, 1)
    y1 = pts[:, 1] * max(height - 1, 1)
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    mask = np.zeros((height, width), dtype=bool)
    xs = np.arange(width)
    for row in range(height):
        y = float(row)
        cond = (y1 > y) != (y2 > y)
        if not cond.any():
            continue
        xi = x1[cond] + (y - y1[cond]) * (x2[cond] - x1[cond]) / (y2[cond] - y1[cond])
        xi.sort()
        hits_right = len(xi) - np.searchsorted(xi, xs, side="right")
        mask[row] = (hits_right % 2) == 1
    return mask


def _session_palette(session: Session, source: str, mode: str, k: int, seed: int):
    if source == "canvas":
        if session.canvas is None:
            raise NoCanvas("upload a canvas snapshot first")
        img, version = session.canvas, session.canvas_version
    else:
        img, version = session.reference, -1
    key = ("palette", source, mode, k, seed, version)
    cached = session.caches.get(key)
    if cached is None:
        cached = extract_dominant(img, mode=mode, k=k, seed=seed, source=source)
        session.caches[key] = cached  # same value under any race; GIL keeps dict safe
    return cached


def _grids_json() -> dict:
    return {
        kind: [p.to_json() for p in generate_grid(GridSpec(kind))]
        for kind in ("rule_of_thirds", "central_cross", "central_circle")
    }


def _composition_impl(session: Session, provider, body: CompositionBody) -> dict:
    boxes = _parse_boxes(body.boxes)
    epsilon = body.epsilon if body.epsilon is not None else session.config.epsilon
    seed = body.seed if body.seed is not None else session.config.ransac.seed
    seg_key = ("segmentation", body.prompt, tuple(b.as_tuple() for b in boxes), provider.name)
    result = session.caches.get(seg_key)
    if result is None:
        request = SegmentationRequest(
            image=session.reference, text_prompt=body.prompt or None, boxes=boxes
        )
        result = segment(request, provider)
        session.caches[seg_key] = result
    cfg = replace(session.config.ransac, seed=seed)
    polygons, lines, _ = compose_scaffold(
        session.reference, provider, body.prompt, boxes, epsilon, cfg, segmentation=result
    )
    return {
        "request": {
            "prompt": body.prompt,
            "boxes": [list(b.as_tuple()) for b in boxes],
            "epsilon": epsilon,
            "seed": seed,
        },
        "provider": provider.name,
        "polygons": [
            {**poly.to_json(), "epsilon_used": eps} for poly, eps in polygons
        ],
        "lines": lines_to_json(lines),
        "grids": _grids_json(),
        "config": session.config.to_json(),
    }


def _feedback_impl(session: Session, mode: str, k: int | None, seed: int | None) -> dict:
    if session.canvas is None:
        raise NoCanvas("upload a canvas snapshot first")
    k = k if k is not None else session.config.palette_k
    seed = seed if seed is not None else session.config.ransac.seed
    reference = _session_palette(session, "reference", mode, k, seed)
    canvas = _session_palette(session, "canvas", mode, k, seed)
    pairs = match_palettes(canvas, reference, session.config.tolerances)
    pairs_json = []
    for pair in pairs:
        item = pair.to_json()
        item["reference_contours"] = [c.to_json() for c in pair.reference.region_contours]
        item["canvas_contours"] = [c.to_json() for c in pair.canvas.region_contours]
        pairs_json.append(item)
    return {
        "mode": mode,
        "request": {"k": k, "seed": seed},
        "canvas_version": session.canvas_version,
        "pairs": pairs_json,
        "config": session.config.to_json(),
    }


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    store = SessionStore(config.persist_dir)
    provider = make_provider(
        config.provider_kind,
        path=config.provider_path,
        url=config.provider_url,
        timeout=config.provider_timeout,
    )
    app = FastAPI(title="drawscaffold", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.provider = provider
    app.state.config = config
    router = APIRouter(prefix="/v1")

    def error_response(exc: Exception) -> JSONResponse:
        status = 422
        for cls, code in _STATUS_BY_ERROR:
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(
            status_code=status,
            content={"error": {"code": type(exc).__name__, "message": str(exc)}},
        )

    @app.exception_handler(ScaffoldError)
    async def _scaffold_error(_request: Request, exc: ScaffoldError):
        return error_response(exc)

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return error_response(exc)

    @router.post("/sessions")
    async def create_session(request: Request):
        data = await request.body()

        def impl():
            reference = decode_png(data)
            session = store.create(reference, config.defaults)
            return {
                "id": session.id,
                "width": reference.width,
                "height": reference.height,
                "config": session.config.to_json(),
            }

        return await run_in_threadpool(impl)

    @router.post("/sessions/{session_id}/canvas")
    async def update_canvas(session_id: str, request: Request):
        data = await request.body()

        def impl():
            session = store.get(session_id)
            canvas = decode_png(data)
            fitted = letterbox_to(canvas, session.reference.width, session.reference.height)
            with session.lock.writing():
                session.canvas = fitted
                session.canvas_version += 1
                session.caches = {
                    key: value
                    for key, value in session.caches.items()
                    if not (key[0] == "palette" and key[1] == "canvas")
                }
                store.persist(session)
                return {
                    "width": fitted.width,
                    "height": fitted.height,
                    "resampled": canvas.width != fitted.width or canvas.height != fitted.height,
                    "canvas_version": session.canvas_version,
                    "config": session.config.to_json(),
                }

        return await run_in_threadpool(impl)

    @router.patch("/sessions/{session_id}/config")
    async def patch_config(session_id: str, body: ConfigPatch):
        def impl():
            session = store.get(session_id)
            with session.lock.writing():
                session.config = session.config.patched(
                    body.model_dump(exclude_none=True)
                )
                session.caches.clear()
                store.persist(session)
                return {"config": session.config.to_json()}

        return await run_in_threadpool(impl)

    @router.post("/sessions/{session_id}/composition")
    async def composition(session_id: str, body: CompositionBody):
        def impl():
            session = store.get(session_id)
            with session.lock.reading():
                return _composition_impl(session, provider, body)

        return await run_in_threadpool(impl)

    @router.get("/sessions/{session_id}/feedback/value")
    async def value_feedback(
        session_id: str, k: int | None = Query(None), seed: int | None = Query(None)
    ):
        def impl():
            session = store.get(session_id)
            with session.lock.reading():
                return _feedback_impl(session, "value", k, seed)

        return await run_in_threadpool(impl)

    @router.get("/sessions/{session_id}/feedback/color")
    async def color_feedback(
        session_id: str, k: int | None = Query(None), seed: int | None = Query(None)
    ):
        def impl():
            session = store.get(session_id)
            with session.lock.reading():
                return _feedback_impl(session, "color", k, seed)

        return await run_in_threadpool(impl)

    @router.get("/sessions/{session_id}/guidance/value")
    async def value_guidance(
        session_id: str,
        target: str = Query("reference"),
        filter: str | None = Query(None),
        kernel_size: float | None = Query(None),
    ):
        def impl():
            session = store.get(session_id)
            with session.lock.reading():
                if target == "canvas":
                    if session.canvas is None:
                        raise NoCanvas("upload a canvas snapshot first")
                    img = session.canvas
                elif target == "reference":
                    img = session.reference
                else:
                    raise ValueError(f"target must be reference or canvas, got {target!r}")
                spec = BlurSpec(
                    filter=filter or session.config.blur.filter,
                    kernel_size=(
                        kernel_size
                        if kernel_size is not None
                        else session.config.blur.kernel_size
                    ),
                )
                blurred = apply_blur(to_value_image(img), spec)
                return Response(content=encode_png(blurred), media_type="image/png")

        return await run_in_threadpool(impl)

    @router.get("/sessions/{session_id}/isolate")
    async def isolate(
        session_id: str,
        x: int = Query(...),
        y: int = Query(...),
        k: int | None = Query(None),
        seed: int | None = Query(None),
    ):
        def impl():
            session = store.get(session_id)
            with session.lock.reading():
                k_eff = k if k is not None else session.config.palette_k
                seed_eff = seed if seed is not None else session.config.ransac.seed
                palette = _session_palette(session, "reference", "color", k_eff, seed_eff)
                preview = isolate_color_preview(session.reference, palette, (x, y))
                return Response(content=encode_png(preview), media_type="image/png")

        return await run_in_threadpool(impl)

    @router.post("/sessions/{session_id}/recolor")
    async def recolor(session_id: str, body: RecolorBody):
        def impl():
            session = store.get(session_id)
            if len(body.lasso) < 3:
                raise DegeneratePolygon(f"lasso needs >= 3 points, got {len(body.lasso)}")
            with session.lock.writing():
                if session.canvas is None:
                    raise NoCanvas("upload a canvas snapshot first")
                mask = rasterize_lasso(
                    np.asarray(body.lasso), session.canvas.width, session.canvas.height
                )
                session.canvas = recolor_region(session.canvas, mask, body.hue, body.saturation)
                session.canvas_version += 1
                session.caches = {
                    key: value
                    for key, value in session.caches.items()
                    if not (key[0] == "palette" and key[1] == "canvas")
                }
                store.persist(session)
                return Response(content=encode_png(session.canvas), media_type="image/png")

        return await run_in_threadpool(impl)

    app.include_router(router)
    return app
