import json

import numpy as np
import pytest

from drawscaffold.errors import AllPixelsFiltered, EmptyPalette, EmptyRegion, OutOfBounds
from drawscaffold.imagecore import ImageBuffer, new_filled, srgb_to_lab
from drawscaffold.palette import (
    Palette,
    _kmeans,
    extract_dominant,
    isolate_color_preview,
    region_mask_for,
)

from _oracles import kmeans_inertia


def banded(colors, heights, width=96):
    rows = []
    for rgb, h in zip(colors, heights):
        band = np.zeros((h, width, 3), np.uint8)
        band[:] = rgb
        rows.append(band)
    return ImageBuffer(np.vstack(rows))


THREE = banded(
    [(200, 40, 40), (60, 180, 90), (50, 80, 200)],
    [64, 40, 24],
)


class TestExtractDominant:
    def test_flat_bands_recovered(self):
        pal = extract_dominant(THREE, mode="color", k=3, seed=0)
        assert len(pal.clusters) == 3
        fracs = [c.pixel_fraction for c in pal.clusters]
        assert fracs == sorted(fracs, reverse=True)
        assert fracs[0] == pytest.approx(0.5, abs=0.01)
        assert fracs[1] == pytest.approx(40 / 128, abs=0.01)
        assert fracs[2] == pytest.approx(24 / 128, abs=0.01)
        want = [srgb_to_lab(np.array(c, float)) for c in [(200, 40, 40), (60, 180, 90), (50, 80, 200)]]
        got = [np.array(c.center_lab.as_tuple()) for c in pal.clusters]
        for w, g in zip(want, got):
            assert np.abs(w - g).max() < 0.5

    def test_equal_fraction_tie_breaks_darker_first(self):
        img = banded([(40, 40, 40), (220, 220, 220)], [32, 32])
        pal = extract_dominant(img, mode="value", k=2, seed=0)
        ls = [c.center_lab.l for c in pal.clusters]
        assert pal.clusters[0].pixel_fraction == pal.clusters[1].pixel_fraction
        assert ls[0] < ls[1]

    def test_value_mode_zeroes_chroma(self):
        pal = extract_dominant(THREE, mode="value", k=3, seed=0)
        for c in pal.clusters:
            assert c.center_lab.a == 0.0 and c.center_lab.b == 0.0
            r, g, b = c.swatch_srgb
            assert r == g == b  # zero chroma renders as gray

    def test_value_mode_filters_extremes_but_keeps_denominator(self):
        img = banded([(0, 0, 0), (128, 128, 128), (255, 255, 255)], [32, 32, 32])
        pal = extract_dominant(img, mode="value", k=3, seed=0)
        assert len(pal.clusters) == 1
        only = pal.clusters[0]
        assert only.center_lab.l == pytest.approx(53.585, abs=0.01)
        # share is of all pixels, including the filtered ones
        assert only.pixel_fraction == pytest.approx(1 / 3, abs=1e-9)

    def test_all_pixels_filtered(self):
        img = banded([(0, 0, 0), (255, 255, 255)], [32, 32])
        with pytest.raises(AllPixelsFiltered):
            extract_dominant(img, mode="value", k=2, seed=0)

    def test_color_mode_keeps_extremes(self):
        img = banded([(0, 0, 0), (255, 255, 255)], [32, 32])
        pal = extract_dominant(img, mode="color", k=2, seed=0)
        assert len(pal.clusters) == 2

    def test_k_reduced_to_distinct_colors(self):
        img = new_filled(40, 40, (90, 120, 150))
        pal = extract_dominant(img, mode="color", k=5, seed=0)
        assert len(pal.clusters) == 1
        assert pal.k_requested == 5
        assert pal.clusters[0].pixel_fraction == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            extract_dominant(THREE, mode="hsl")
        with pytest.raises(ValueError):
            extract_dominant(THREE, mode="color", k=0)

    def test_deterministic_across_calls(self):
        rng = np.random.default_rng(2)
        base = np.repeat(
            np.array([(200, 40, 40), (60, 180, 90), (50, 80, 200), (230, 220, 90)], np.int16),
            20,
            axis=0,
        )[:, None, :]
        noisy_arr = base + rng.integers(-4, 5, (80, 80, 3), dtype=np.int16)
        noisy = ImageBuffer(np.clip(noisy_arr, 0, 255).astype(np.uint8))
        a = extract_dominant(noisy, mode="color", k=4, seed=9)
        b = extract_dominant(noisy, mode="color", k=4, seed=9)
        assert len(a.clusters) == 4
        assert json.dumps(a.to_json()) == json.dumps(b.to_json())

    def test_source_and_mode_recorded(self):
        pal = extract_dominant(THREE, mode="color", k=2, seed=0, source="reference")
        assert pal.source == "reference"
        assert pal.mode == "color"
        assert all(c.mode == "color" for c in pal.clusters)

    def test_unresolvable_region_raises(self):
        # k=1 across two saturated colors lands between them, far from both
        img = banded([(255, 0, 0), (0, 0, 255)], [32, 32])
        with pytest.raises(EmptyRegion):
            extract_dominant(img, mode="color", k=1, seed=0)


class TestRegions:
    def test_band_region_geometry(self):
        pal = extract_dominant(THREE, mode="color", k=3, seed=0)
        top = pal.clusters[0]  # largest share: the 64-row band
        assert top.bbox.x_min == 0.0 and top.bbox.x_max == 1.0
        assert top.bbox.y_min == 0.0
        assert top.bbox.y_max == pytest.approx(63 / 127)
        assert len(top.region_contours) == 1

    def test_region_mask_matches_band(self):
        pal = extract_dominant(THREE, mode="color", k=3, seed=0)
        mask, contours, bbox = region_mask_for(THREE, pal.clusters[0])
        assert mask.shape == (128, 96)
        assert mask[:64].all()
        assert not mask[64:].any()
        assert bbox == pal.clusters[0].bbox

    def test_downsampled_clustering_keeps_full_res_masks(self):
        img = banded([(200, 40, 40), (50, 80, 200)], [300, 300], width=640)
        pal = extract_dominant(img, mode="color", k=2, seed=0)
        assert len(pal.clusters) == 2
        assert pal.clusters[0].pixel_fraction == pytest.approx(0.5, abs=0.02)
        mask, _, _ = region_mask_for(img, pal.clusters[0])
        assert mask.shape == (600, 640)


class TestKmeans:
    def test_inertia_never_increases(self):
        rng = np.random.default_rng(4)
        data = np.vstack(
            [
                rng.normal((10, 0, 0), 2.0, (200, 3)),
                rng.normal((60, 10, -10), 2.0, (200, 3)),
                rng.normal((90, -20, 30), 2.0, (200, 3)),
            ]
        )
        _, _, inertia = _kmeans(data, 3, np.random.default_rng(0))
        assert len(inertia) >= 2
        for a, b in zip(inertia, inertia[1:]):
            assert b <= a + 1e-7

    def test_final_inertia_matches_reference(self):
        rng = np.random.default_rng(5)
        data = rng.uniform(0, 100, (120, 3))
        centers, labels, inertia = _kmeans(data, 4, np.random.default_rng(1))
        assert inertia[-1] == pytest.approx(kmeans_inertia(data, centers), rel=1e-9)
        # labels point at each row's nearest center
        for i in (0, 17, 63, 119):
            d = ((centers - data[i]) ** 2).sum(axis=1)
            assert labels[i] == d.argmin()


class TestIsolate:
    def test_masks_other_regions_white(self):
        pal = extract_dominant(THREE, mode="color", k=3, seed=0)
        out = isolate_color_preview(THREE, pal, (10, 10))
        assert np.array_equal(out.pixels[:64], THREE.pixels[:64])
        assert (out.pixels[64:] == 255).all()

    def test_out_of_bounds(self):
        pal = extract_dominant(THREE, mode="color", k=2, seed=0)
        with pytest.raises(OutOfBounds):
            isolate_color_preview(THREE, pal, (96, 10))
        with pytest.raises(OutOfBounds):
            isolate_color_preview(THREE, pal, (-1, 10))

    def test_empty_palette(self):
        empty = Palette(clusters=(), mode="color")
        with pytest.raises(EmptyPalette):
            isolate_color_preview(THREE, empty, (0, 0))


class TestSerialization:
    def test_cluster_json_fields(self):
        pal = extract_dominant(THREE, mode="color", k=2, seed=0)
        data = pal.to_json()
        assert data["mode"] == "color"
        assert data["k_requested"] == 2
        first = data["clusters"][0]
        assert set(first) == {"lab", "srgb", "pixel_fraction", "bbox", "contours"}
        assert len(first["bbox"]) == 4
