import json

import numpy as np
import pytest
from click.testing import CliRunner

from drawscaffold.cli import main
from drawscaffold.imagecore import ImageBuffer, load_png, save_png


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def reference_path(tmp_path):
    arr = np.zeros((64, 64, 3), dtype=np.uint8)
    arr[:32] = 230
    arr[32:] = 60
    path = tmp_path / "reference.png"
    save_png(ImageBuffer(arr), path)
    return path


class TestCompose:
    def test_writes_all_artifacts(self, runner, reference_path, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "compose",
            "--reference", str(reference_path),
            "--box", "0.1,0.4,0.45,0.6",
            "--box", "0.55,0.4,0.9,0.6",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert "2 polygons" in result.output
        for name in ("composition.json", "lines.csv", "overlay.svg", "composition.png"):
            assert (out / name).exists(), name

        data = json.loads((out / "composition.json").read_text())
        assert len(data["polygons"]) == 2
        assert data["provider"] == "box_fallback"
        assert len(data["lines"]) <= data["config"]["k_lines"]
        assert data["lines_total"] >= len(data["lines"])

        csv_lines = (out / "lines.csv").read_text().splitlines()
        assert csv_lines[0].startswith("rank,")
        assert len(csv_lines) == len(data["lines"]) + 1

        svg = (out / "overlay.svg").read_text()
        assert svg.startswith("<svg")
        assert (out / "composition.png").read_bytes()[:4] == b"\x89PNG"

    def test_grid_flag(self, runner, reference_path, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "compose",
            "--reference", str(reference_path),
            "--box", "0.2,0.3,0.7,0.6",
            "--grid", "rule_of_thirds",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert "#7f7f7f" in (out / "overlay.svg").read_text()

    def test_k_truncates(self, runner, reference_path, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "compose",
            "--reference", str(reference_path),
            "--box", "0.1,0.4,0.45,0.6",
            "--box", "0.55,0.4,0.9,0.6",
            "--k", "1",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads((out / "composition.json").read_text())
        assert len(data["lines"]) <= 1

    def test_bad_box(self, runner, reference_path):
        result = runner.invoke(main, [
            "compose", "--reference", str(reference_path), "--box", "0.1,0.2,0.3",
        ])
        assert result.exit_code != 0
        assert "expected x0,y0,x1,y1" in result.output

    def test_config_file_defaults(self, runner, reference_path, tmp_path):
        cfg = tmp_path / "app.json"
        cfg.write_text(json.dumps({"defaults": {"epsilon": 0.9}}))
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "compose",
            "--reference", str(reference_path),
            "--box", "0.2,0.3,0.7,0.6",
            "--config", str(cfg),
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads((out / "composition.json").read_text())
        assert data["request"]["epsilon"] == 0.9
        assert data["polygons"][0]["epsilon_used"] == pytest.approx(0.225)


class TestFeedback:
    @pytest.mark.parametrize("mode", ["value", "color"])
    def test_writes_artifacts(self, runner, reference_path, tmp_path, mode):
        out = tmp_path / "out"
        result = runner.invoke(main, [
            mode,
            "--reference", str(reference_path),
            "--canvas", str(reference_path),
            "--k", "2",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert "matched pairs" in result.output
        data = json.loads((out / f"{mode}_feedback.json").read_text())
        assert data["mode"] == mode
        assert len(data["pairs"]) == 2
        csv_lines = (out / f"{mode}_pairs.csv").read_text().splitlines()
        assert csv_lines[0].startswith("reference_index,")
        assert len(csv_lines) == 3
        assert (out / f"{mode}_pairs.png").read_bytes()[:4] == b"\x89PNG"

    def test_canvas_required(self, runner, reference_path):
        result = runner.invoke(main, ["value", "--reference", str(reference_path)])
        assert result.exit_code != 0
        assert "--canvas" in result.output


class TestSquint:
    def test_writes_grayscale(self, runner, reference_path, tmp_path):
        out = tmp_path / "study.png"
        result = runner.invoke(main, [
            "squint", "--image", str(reference_path), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        img = load_png(out)
        assert np.array_equal(img.pixels[..., 0], img.pixels[..., 1])

    def test_bad_kernel(self, runner, reference_path, tmp_path):
        result = runner.invoke(main, [
            "squint",
            "--image", str(reference_path),
            "--kernel-size", "12",
            "--out", str(tmp_path / "study.png"),
        ])
        assert result.exit_code != 0


class TestIsolate:
    def test_keeps_hovered_band(self, runner, reference_path, tmp_path):
        out = tmp_path / "isolated.png"
        result = runner.invoke(main, [
            "isolate",
            "--reference", str(reference_path),
            "--x", "5", "--y", "5", "--k", "2",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        img = load_png(out)
        assert tuple(img.pixels[2, 2]) == (230, 230, 230)
        assert tuple(img.pixels[60, 60]) == (255, 255, 255)

    def test_out_of_bounds(self, runner, reference_path, tmp_path):
        result = runner.invoke(main, [
            "isolate",
            "--reference", str(reference_path),
            "--x", "200", "--y", "5",
            "--out", str(tmp_path / "isolated.png"),
        ])
        assert result.exit_code != 0
