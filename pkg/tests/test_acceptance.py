"""Acceptance gate for the shipped behavior.

One test per criterion; each prints a single PASS/FAIL line (run with
``pytest tests/test_acceptance.py -v -s`` to see them all). Tolerances
are pinned as module constants so a regression shows up as a diff here,
not as a silently loosened bound.
"""

import json
import math
import threading
import time

import numpy as np

from drawscaffold.composition import RansacConfig, fit_composition_lines, lines_to_json
from drawscaffold.config import AppConfig
from drawscaffold.errors import AllPixelsFiltered
from drawscaffold.geometry import (
    BoundingBox,
    DenseContour,
    PolygonContour,
    extract_outer_contour,
    sample_polygon_points,
    simplify_rdp,
)
from drawscaffold.imagecore import (
    HsvColor,
    ImageBuffer,
    LabColor,
    encode_png,
    hsv_to_rgb8,
    lab_to_rgb8,
    lab_to_srgb,
    srgb_to_hsv,
    srgb_to_lab,
    hsv_to_srgb,
)
from drawscaffold.matching import (
    MatchPair,
    combined_score,
    match_palettes,
    render_color_feedback,
    render_value_feedback,
)
from drawscaffold.palette import DominantCluster, Palette, extract_dominant
from drawscaffold.pipeline import compose_scaffold, palette_feedback
from drawscaffold.segmentation import make_provider

# criterion 1: rank-0 line recovery over seeded synthetic scenes
ANGLE_TOL_DEG = 2.0
MIDPOINT_TOL = 0.02
MIN_HITS = 95
RECOVERY_BUDGET_S = 1.0

# criterion 7: flat-color palette recovery
CENTER_TOL_LAB = 1.0
FRACTION_TOL = 0.01

# criterion 9: colorspace round trips
ROUND_TRIP_TOL = 1.0  # per channel, 8-bit steps
ENDPOINT_TOL = 1e-6

# criterion 10: value advice boundary
VALUE_BOUNDARY = 3.0

# criterion 11: per-stage runtime on a 1024x1024 reference
STAGE_BUDGET_S = 2.0

THETA_DIS = RansacConfig().theta_dis
THETA_INL = RansacConfig().theta_inl


def report(n: int, ok: bool, detail: str) -> None:
    print(f"criterion {n:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def diamond(pid: int, cx: float, cy: float, h: float, rng=None) -> PolygonContour:
    v = np.array([[cx - h, cy], [cx, cy - h], [cx + h, cy], [cx, cy + h]])
    if rng is not None:
        v = v + rng.normal(0.0, 0.005, size=v.shape)
    return PolygonContour(id=pid, vertices=v)


def sample_all(polys) -> list:
    return [p for poly in polys for p in sample_polygon_points(poly)]


def grid_scene():
    """Six diamonds on two rows; supports at least the two row lines."""
    rng = np.random.default_rng(42)
    polys = []
    pid = 0
    for cy in (0.3, 0.7):
        for cx in (0.2, 0.5, 0.8):
            polys.append(diamond(pid, cx, cy, 0.1, rng))
            pid += 1
    return sample_all(polys)


def test_criterion_01_line_recovery():
    t0 = time.perf_counter()
    hits = 0
    worst_ang = worst_dist = 0.0
    for t in range(100):
        rng = np.random.default_rng(1000 + t)
        cy = 0.5 + rng.uniform(-0.01, 0.01)
        polys = [
            diamond(pid, cx, cy, 0.1, rng) for pid, cx in enumerate((0.2, 0.5, 0.8))
        ]
        lines = fit_composition_lines(sample_all(polys), RansacConfig(seed=t))
        if not lines:
            continue
        nx, ny = lines[0].normal
        ang = math.degrees(math.atan2(abs(nx), abs(ny)))
        dist = abs(nx * 0.5 + ny * cy - lines[0].offset)
        if ang <= ANGLE_TOL_DEG and dist <= MIDPOINT_TOL:
            hits += 1
            worst_ang = max(worst_ang, ang)
            worst_dist = max(worst_dist, dist)
    elapsed = time.perf_counter() - t0
    ok = hits >= MIN_HITS and elapsed < RECOVERY_BUDGET_S
    report(
        1,
        ok,
        f"rank-0 within {ANGLE_TOL_DEG} deg / {MIDPOINT_TOL} in {hits}/100 trials "
        f"(worst {worst_ang:.2f} deg, {worst_dist:.4f}); {elapsed:.2f}s",
    )


def test_criterion_02_single_polygon_yields_nothing():
    bad = 0
    for t in range(20):
        rng = np.random.default_rng(200 + t)
        ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, 12))
        rad = rng.uniform(0.1, 0.4, 12)
        verts = np.stack([0.5 + rad * np.cos(ang), 0.5 + rad * np.sin(ang)], axis=1)
        points = sample_polygon_points(PolygonContour(id=0, vertices=verts))
        if fit_composition_lines(points, RansacConfig(seed=t)):
            bad += 1
    report(2, bad == 0, f"single-polygon scenes with lines: {bad}/20 (want 0)")


def test_criterion_03_determinism_and_inlier_accounting():
    points = grid_scene()
    cfg = RansacConfig(seed=123)
    first = json.dumps(lines_to_json(fit_composition_lines(points, cfg)))
    lines = fit_composition_lines(points, cfg)
    identical = first == json.dumps(lines_to_json(lines))

    pts = np.array([[sp.point.x, sp.point.y] for sp in points])
    n = len(pts)
    remaining = np.ones(n, dtype=bool)
    disjoint = bool(lines)
    fractions_ok = True
    for line in lines:
        normal = np.array(line.normal)
        dist = np.abs(pts @ normal - line.offset)
        claim = (dist <= THETA_DIS) & remaining
        # rank-order reclaim from untouched points must reproduce each count
        disjoint &= int(claim.sum()) == line.inliers
        fractions_ok &= line.inlier_fraction == line.inliers / n
        fractions_ok &= line.inlier_fraction >= THETA_INL
        remaining &= ~claim
    ok = identical and disjoint and fractions_ok
    report(
        3,
        ok,
        f"replay identical={identical}, disjoint inliers={disjoint}, "
        f"fractions vs original n={fractions_ok} over {len(lines)} lines",
    )


def test_criterion_04_retention_threshold_monotone():
    points = grid_scene()
    counts = []
    for theta in (0.05, 0.10, 0.20):
        cfg = RansacConfig(seed=5, theta_inl=theta)
        counts.append(len(fit_composition_lines(points, cfg)))
    ok = counts[0] >= counts[1] >= counts[2]
    report(4, ok, f"line counts at theta_inl 0.05/0.10/0.20: {counts}")


def _random_cluster(rng) -> DominantCluster:
    lab = LabColor(
        float(rng.uniform(0, 100)), float(rng.uniform(-60, 60)), float(rng.uniform(-60, 60))
    )
    x0, y0 = rng.uniform(0.0, 0.8, 2)
    w, h = rng.uniform(0.05, 0.2, 2)
    return DominantCluster(
        center_lab=lab,
        swatch_srgb=lab_to_rgb8(lab),
        pixel_fraction=float(rng.uniform(0.05, 1.0)),
        region_contours=(),
        bbox=BoundingBox(x0, y0, min(x0 + w, 1.0), min(y0 + h, 1.0)),
        mode="color",
    )


def test_criterion_05_matching_equals_exhaustive_argmax():
    from _oracles import match_brute

    rng = np.random.default_rng(77)
    mismatches = 0
    for _ in range(200):
        refs = [_random_cluster(rng) for _ in range(int(rng.integers(1, 7)))]
        cans = [_random_cluster(rng) for _ in range(int(rng.integers(1, 7)))]
        pairs = match_palettes(
            Palette(clusters=tuple(cans), mode="color", source="canvas"),
            Palette(clusters=tuple(refs), mode="color", source="reference"),
        )
        expected = match_brute(
            [
                {"lab": c.center_lab.as_tuple(), "bbox": c.bbox.as_tuple(), "fraction": c.pixel_fraction}
                for c in cans
            ],
            [
                {"lab": c.center_lab.as_tuple(), "bbox": c.bbox.as_tuple(), "fraction": c.pixel_fraction}
                for c in refs
            ],
        )
        for pair, (want_idx, want_score) in zip(pairs, expected):
            if pair.canvas_index != want_idx or abs(pair.score.s_total - want_score) > 1e-12:
                mismatches += 1
    report(5, mismatches == 0, f"mismatches vs brute-force argmax: {mismatches}/200 palettes")


def test_criterion_06_similarity_spot_values():
    full = BoundingBox(0.0, 0.0, 1.0, 1.0)
    left = BoundingBox(0.0, 0.0, 0.4, 1.0)
    right = BoundingBox(0.6, 0.0, 1.0, 1.0)

    def mk(lab, bbox):
        c = LabColor(*lab)
        return DominantCluster(
            center_lab=c,
            swatch_srgb=lab_to_rgb8(c),
            pixel_fraction=0.5,
            region_contours=(),
            bbox=bbox,
            mode="value",
        )

    a = mk((50.0, 10.0, -20.0), full)
    identical = combined_score(a, a).s_total == 1.0
    disjoint = (
        combined_score(mk((50.0, 10.0, -20.0), left), mk((50.0, 10.0, -20.0), right)).s_total
        == 0.4
    )
    poles = combined_score(mk((0.0, 0.0, 0.0), full), mk((100.0, 0.0, 0.0), full)).s_total
    poles_ok = abs(poles - (0.4 * (2.0 / 3.0) + 0.6)) <= 1e-9
    ok = identical and disjoint and poles_ok
    report(
        6,
        ok,
        f"identical==1.0: {identical}, disjoint boxes==0.4: {disjoint}, "
        f"value poles within 1e-9: {poles_ok}",
    )


def test_criterion_07_palette_recovery_and_extreme_filter():
    colors = ((200, 40, 40), (60, 180, 90), (50, 80, 200))
    widths = (128, 86, 42)
    arr = np.zeros((256, 256, 3), dtype=np.uint8)
    x = 0
    for color, w in zip(colors, widths):
        arr[:, x : x + w] = color
        x += w
    img = ImageBuffer(arr)

    palette = extract_dominant(img, mode="color", k=3, seed=0, source="reference")
    again = extract_dominant(img, mode="color", k=3, seed=0, source="reference")
    deterministic = json.dumps(palette.to_json()) == json.dumps(again.to_json())

    truth = sorted(
        (
            (w / 256.0, tuple(srgb_to_lab(np.array(c, dtype=float))))
            for c, w in zip(colors, widths)
        ),
        reverse=True,
    )
    centers_ok = len(palette.clusters) == 3
    fractions_ok = True
    for cluster, (frac, lab) in zip(palette.clusters, truth):
        got = np.array(cluster.center_lab.as_tuple())
        centers_ok &= float(np.linalg.norm(got - np.array(lab))) <= CENTER_TOL_LAB
        fractions_ok &= abs(cluster.pixel_fraction - frac) <= FRACTION_TOL

    checker = np.indices((64, 64)).sum(axis=0) % 2
    board = np.where(checker[..., None] == 1, 255, 0).astype(np.uint8)
    board = np.repeat(board, 3, axis=2) if board.shape[2] == 1 else board
    try:
        extract_dominant(ImageBuffer(board), mode="value", k=2, seed=0, source="reference")
        filtered = False
    except AllPixelsFiltered:
        filtered = True
    ok = deterministic and centers_ok and fractions_ok and filtered
    report(
        7,
        ok,
        f"centers within Lab {CENTER_TOL_LAB}: {centers_ok}, fractions within "
        f"{FRACTION_TOL}: {fractions_ok}, deterministic: {deterministic}, "
        f"black/white board filtered: {filtered}",
    )


def test_criterion_08_simplification_contract():
    mask = np.zeros((100, 100), dtype=np.uint8)
    mask[20:70, 30:80] = 1
    contour = extract_outer_contour(mask)[0]
    rect = simplify_rdp(contour, 0.005)
    four = len(rect.vertices) == 4

    t = np.linspace(0.0, 2.0 * np.pi, 240, endpoint=False)
    r = 0.3 + 0.02 * np.sin(7.0 * t)
    ring = DenseContour(
        points=np.stack([0.5 + r * np.cos(t), 0.5 + r * np.sin(t)], axis=1)
    )
    ladder = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05)
    counts = [len(simplify_rdp(ring, eps).vertices) for eps in ladder]
    monotone = all(a >= b for a, b in zip(counts, counts[1:]))

    def seg_dist(p, a, b):
        ab = b - a
        denom = float(ab @ ab)
        tt = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
        return float(np.hypot(*(p - (a + tt * ab))))

    eps = 0.02
    poly = simplify_rdp(ring, eps).vertices
    edges = [(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly))]
    deviation = max(
        min(seg_dist(p, a, b) for a, b in edges) for p in ring.points
    )
    ok = four and monotone and deviation <= eps
    report(
        8,
        ok,
        f"rectangle -> {len(rect.vertices)} vertices, counts {counts} monotone={monotone}, "
        f"max deviation {deviation:.4f} <= {eps}",
    )


def test_criterion_09_colorspace_round_trips():
    rng = np.random.default_rng(5)
    rgb = rng.integers(0, 256, (100_000, 3), dtype=np.uint8)
    lab_err = float(np.abs(np.rint(lab_to_srgb(srgb_to_lab(rgb))) - rgb).max())
    hsv_err = float(np.abs(np.rint(hsv_to_srgb(srgb_to_hsv(rgb))) - rgb).max())
    white = srgb_to_lab(np.array([255.0, 255.0, 255.0]))
    black = srgb_to_lab(np.array([0.0, 0.0, 0.0]))
    endpoints = (
        float(np.abs(white - np.array([100.0, 0.0, 0.0])).max()) <= ENDPOINT_TOL
        and float(np.abs(black).max()) <= ENDPOINT_TOL
    )
    ok = lab_err <= ROUND_TRIP_TOL and hsv_err <= ROUND_TRIP_TOL and endpoints
    report(
        9,
        ok,
        f"max round-trip error over 100k colors: Lab {lab_err:.0f}, HSV {hsv_err:.0f} "
        f"(tol {ROUND_TRIP_TOL:.0f}); white/black exact: {endpoints}",
    )


def _pair(canvas: DominantCluster, reference: DominantCluster) -> MatchPair:
    return MatchPair(
        reference_index=0,
        canvas_index=0,
        reference=reference,
        canvas=canvas,
        score=combined_score(canvas, reference),
        feedback=(),
    )


def _value_cluster(l_star: float) -> DominantCluster:
    c = LabColor(l_star, 0.0, 0.0)
    return DominantCluster(
        center_lab=c,
        swatch_srgb=lab_to_rgb8(c),
        pixel_fraction=0.5,
        region_contours=(),
        bbox=BoundingBox(0.0, 0.0, 1.0, 1.0),
        mode="value",
    )


def _hue_cluster(hue: float) -> DominantCluster:
    rgb = hsv_to_rgb8(HsvColor(hue, 0.6, 0.7))
    lab = LabColor(*srgb_to_lab(np.array(rgb, dtype=float)))
    return DominantCluster(
        center_lab=lab,
        swatch_srgb=rgb,
        pixel_fraction=0.5,
        region_contours=(),
        bbox=BoundingBox(0.0, 0.0, 1.0, 1.0),
        mode="color",
    )


def test_criterion_10_feedback_rules():
    at_boundary = render_value_feedback(_pair(_value_cluster(53.0), _value_cluster(50.0)))
    above = render_value_feedback(_pair(_value_cluster(53.5), _value_cluster(50.0)))
    below = render_value_feedback(_pair(_value_cluster(46.5), _value_cluster(50.0)))
    boundary_ok = (
        at_boundary.direction == "match"
        and above.direction == "darken"
        and below.direction == "lighten"
        and at_boundary.magnitude == VALUE_BOUNDARY
    )

    greener, yellower = _hue_cluster(140.0), _hue_cluster(100.0)
    fwd = render_color_feedback(_pair(greener, yellower))[0]
    rev = render_color_feedback(_pair(yellower, greener))[0]
    antisym = (
        fwd.direction == "warmer"
        and rev.direction == "cooler"
        and abs(fwd.magnitude - rev.magnitude) <= 1e-9
    )

    cross = render_color_feedback(_pair(_hue_cluster(120.0), _hue_cluster(180.0)))[0]
    cross_ok = (
        cross.direction == "toward_category"
        and cross.target_category == "cyan"
        and "more cyan in hue" in cross.text
    )
    ok = boundary_ok and antisym and cross_ok
    report(
        10,
        ok,
        f"value boundary at {VALUE_BOUNDARY} L*: {boundary_ok}, warm/cool antisymmetry: "
        f"{antisym}, cross-category names reference ('{cross.target_category}'): {cross_ok}",
    )


def test_criterion_11_stage_runtimes():
    side = 1024
    arr = np.empty((side, side, 3), dtype=np.uint8)
    arr[:] = np.linspace(30, 220, side).astype(np.uint8)[:, None, None]
    arr[200:500, 150:450] = (180, 60, 50)
    arr[550:850, 560:880] = (40, 90, 170)
    reference = ImageBuffer(arr)
    canvas_arr = arr.copy()
    canvas_arr[200:500, 150:450] = (150, 80, 70)
    canvas = ImageBuffer(canvas_arr)

    provider = make_provider("box")
    boxes = (
        BoundingBox(150 / side, 200 / side, 450 / side, 500 / side),
        BoundingBox(560 / side, 550 / side, 880 / side, 850 / side),
    )

    t0 = time.perf_counter()
    polygons, lines, _ = compose_scaffold(
        reference, provider, None, boxes, 0.01, RansacConfig(seed=0)
    )
    t_compose = time.perf_counter() - t0

    t0 = time.perf_counter()
    value_pairs = palette_feedback(reference, canvas, "value", 5, 0)
    t_value = time.perf_counter() - t0

    t0 = time.perf_counter()
    color_pairs = palette_feedback(reference, canvas, "color", 5, 0)
    t_color = time.perf_counter() - t0

    produced = bool(polygons) and bool(value_pairs) and bool(color_pairs)
    ok = (
        produced
        and t_compose < STAGE_BUDGET_S
        and t_value < STAGE_BUDGET_S
        and t_color < STAGE_BUDGET_S
    )
    report(
        11,
        ok,
        f"1024^2 stage times: compose {t_compose:.2f}s, value {t_value:.2f}s, "
        f"color {t_color:.2f}s (budget {STAGE_BUDGET_S:.0f}s each)",
    )


def _client():
    import warnings

    from drawscaffold.service import create_app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    return TestClient(create_app(AppConfig()))


def _band_png(top, bottom):
    arr = np.zeros((64, 64, 3), dtype=np.uint8)
    arr[:32] = top
    arr[32:] = bottom
    return encode_png(ImageBuffer(arr))


def test_criterion_12_service_replay_and_isolation():
    client = _client()
    png = _band_png((230, 230, 230), (60, 60, 60))
    body = {"boxes": [[0.1, 0.4, 0.45, 0.6], [0.55, 0.4, 0.9, 0.6]], "seed": 3}
    patch = {"epsilon": 0.02, "ransac": {"iterations": 500}}

    def run_once():
        sid = client.post("/v1/sessions", content=png).json()["id"]
        client.patch(f"/v1/sessions/{sid}/config", json=patch)
        return client.post(f"/v1/sessions/{sid}/composition", json=body).content

    replay_ok = run_once() == run_once()

    bases = [(30 * i + 15, 10, 240 - 25 * i) for i in range(8)]
    failures = []

    def worker(i):
        try:
            top = bases[i]
            bottom = (255 - top[0], 245 - top[1], 255 - top[2])
            mine = _band_png(top, bottom)
            sid = client.post("/v1/sessions", content=mine).json()["id"]
            box = [0.1, 0.05 * i + 0.1, 0.5, 0.05 * i + 0.3]
            for it in range(3):
                resp = client.post(f"/v1/sessions/{sid}/canvas", content=mine)
                if resp.json()["canvas_version"] != it + 1:
                    raise AssertionError(f"version leak in session {i}")
                fb = client.get(f"/v1/sessions/{sid}/feedback/color", params={"k": 2})
                got = {tuple(p["reference"]["srgb"]) for p in fb.json()["pairs"]}
                for rgb in got:
                    if min(
                        max(abs(a - b) for a, b in zip(rgb, want))
                        for want in (top, bottom)
                    ) > 2:
                        raise AssertionError(f"palette leak in session {i}: {rgb}")
                comp = client.post(
                    f"/v1/sessions/{sid}/composition", json={"boxes": [box]}
                ).json()
                if comp["request"]["boxes"] != [box]:
                    raise AssertionError(f"request echo leak in session {i}")
                ys = [
                    y
                    for poly in comp["polygons"]
                    for _, y in poly["vertices"]
                ]
                if min(ys) < box[1] - 0.02 or max(ys) > box[3] + 0.02:
                    raise AssertionError(f"polygon leak in session {i}")
        except Exception as exc:  # noqa: BLE001 - collected for the report
            failures.append(f"client {i}: {exc!r}")

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    ok = replay_ok and not failures
    report(
        12,
        ok,
        f"config-pinned replay identical: {replay_ok}; 8-client isolation failures: "
        f"{failures or 'none'}",
    )
