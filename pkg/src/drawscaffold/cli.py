"""Command line front end.

Each subcommand writes its machine-readable output (JSON / CSV / SVG)
next to rendered matplotlib figures so a run can be inspected without
starting the service.
"""

from __future__ import annotations

import json
import os
from dataclasses import replace

import click

from .composition import lines_to_json, top_k_lines
from .config import AppConfig, SessionConfig
from .geometry import BoundingBox
from .imagecore import BlurSpec, apply_blur, load_png, save_png, to_value_image
from .palette import extract_dominant, isolate_color_preview
from .pipeline import compose_scaffold, palette_feedback
from .segmentation import make_provider


def _load_app_config(path: str | None) -> AppConfig:
    return AppConfig.load(path=path, env=os.environ)


def _provider_from_flags(app_cfg: AppConfig, kind, path, url, timeout):
    return make_provider(
        kind or app_cfg.provider_kind,
        path=path or app_cfg.provider_path,
        url=url or app_cfg.provider_url,
        timeout=timeout if timeout is not None else app_cfg.provider_timeout,
    )


def _parse_box_flag(values: tuple[str, ...]) -> tuple[BoundingBox, ...]:
    boxes = []
    for raw in values:
        parts = [float(v) for v in raw.split(",")]
        if len(parts) != 4:
            raise click.BadParameter(f"expected x0,y0,x1,y1 but got {raw!r}")
        boxes.append(BoundingBox(*parts))
    return tuple(boxes)


provider_options = [
    click.option("--provider", "provider_kind", default=None, help="box, file, or sidecar."),
    click.option("--provider-path", default=None, help="Mask directory for the file provider."),
    click.option("--provider-url", default=None, help="Base URL for the sidecar provider."),
    click.option("--provider-timeout", type=float, default=None),
]


def _with_options(opts):
    def wrap(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn

    return wrap


@click.group()
def main():
    """Composition scaffolds and palette feedback for drawing studies."""


@main.command()
@click.option("--reference", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--prompt", default=None, help="Text prompt for the segmentation provider.")
@click.option("--box", "boxes", multiple=True, help="Normalized box x0,y0,x1,y1; repeatable.")
@click.option("--epsilon", type=float, default=None, help="Simplification tolerance.")
@click.option("--k", type=int, default=None, help="Keep only the top k lines.")
@click.option("--seed", type=int, default=None)
@click.option("--grid", default=None, help="rule_of_thirds, central_cross, or central_circle.")
@click.option("--out", type=click.Path(file_okay=False), default="scaffold_out")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_with_options(provider_options)
def compose(
    reference,
    prompt,
    boxes,
    epsilon,
    k,
    seed,
    grid,
    out,
    config_path,
    provider_kind,
    provider_path,
    provider_url,
    provider_timeout,
):
    """Fit composition lines over segmented regions of the reference."""
    from . import report, svg

    app_cfg = _load_app_config(config_path)
    cfg: SessionConfig = app_cfg.defaults
    provider = _provider_from_flags(
        app_cfg, provider_kind, provider_path, provider_url, provider_timeout
    )
    image = load_png(reference)
    parsed_boxes = _parse_box_flag(boxes)
    eps = epsilon if epsilon is not None else cfg.epsilon
    ransac = replace(cfg.ransac, seed=seed) if seed is not None else cfg.ransac
    k_eff = k if k is not None else cfg.k_lines

    polygons, lines, seg = compose_scaffold(
        image, provider, prompt, parsed_boxes, eps, ransac
    )
    kept = top_k_lines(lines, k_eff)

    os.makedirs(out, exist_ok=True)
    payload = {
        "request": {
            "prompt": prompt,
            "boxes": [list(b.as_tuple()) for b in parsed_boxes],
            "epsilon": eps,
            "seed": ransac.seed,
            "k": k_eff,
        },
        "provider": seg.provider,
        "polygons": [{**p.to_json(), "epsilon_used": e} for p, e in polygons],
        "lines": lines_to_json(kept),
        "lines_total": len(lines),
        "config": cfg.to_json(),
    }
    with open(os.path.join(out, "composition.json"), "w") as fh:
        json.dump(payload, fh, indent=2)
    report.write_lines_csv(kept, os.path.join(out, "lines.csv"))
    with open(os.path.join(out, "overlay.svg"), "w") as fh:
        fh.write(svg.overlay_svg([p for p, _ in polygons], kept, grid=grid))
    report.composition_figure(
        image, [p for p, _ in polygons], kept, os.path.join(out, "composition.png"), grid=grid
    )
    click.echo(
        f"{len(polygons)} polygons, {len(kept)} of {len(lines)} lines -> {out}/"
    )


def _feedback_command(mode: str):
    @click.option("--reference", type=click.Path(exists=True, dir_okay=False), required=True)
    @click.option("--canvas", type=click.Path(exists=True, dir_okay=False), required=True)
    @click.option("--k", type=int, default=None, help="Palette size.")
    @click.option("--seed", type=int, default=None)
    @click.option("--out", type=click.Path(file_okay=False), default="scaffold_out")
    @click.option(
        "--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None
    )
    def run(reference, canvas, k, seed, out, config_path):
        from . import report

        app_cfg = _load_app_config(config_path)
        cfg = app_cfg.defaults
        ref_img = load_png(reference)
        can_img = load_png(canvas)
        k_eff = k if k is not None else cfg.palette_k
        seed_eff = seed if seed is not None else cfg.ransac.seed
        pairs = palette_feedback(
            ref_img, can_img, mode, k_eff, seed_eff, cfg.tolerances
        )
        os.makedirs(out, exist_ok=True)
        payload = {
            "mode": mode,
            "request": {"k": k_eff, "seed": seed_eff},
            "pairs": [p.to_json() for p in pairs],
            "config": cfg.to_json(),
        }
        with open(os.path.join(out, f"{mode}_feedback.json"), "w") as fh:
            json.dump(payload, fh, indent=2)
        report.write_pairs_csv(pairs, os.path.join(out, f"{mode}_pairs.csv"))
        report.pairs_figure(pairs, mode, os.path.join(out, f"{mode}_pairs.png"))
        click.echo(f"{len(pairs)} matched pairs -> {out}/")

    run.__name__ = mode
    return run


main.command(name="value", help="Match value palettes and report lightness feedback.")(
    _feedback_command("value")
)
main.command(name="color", help="Match color palettes and report hue/saturation feedback.")(
    _feedback_command("color")
)


@main.command()
@click.option("--image", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--filter", "filter_name", default=None, help="gaussian, median, or bilateral.")
@click.option("--kernel-size", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default="value_study.png")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def squint(image, filter_name, kernel_size, out, config_path):
    """Blurred grayscale study of an image, like squinting at it."""
    cfg = _load_app_config(config_path).defaults
    spec = BlurSpec(
        filter=filter_name or cfg.blur.filter,
        kernel_size=kernel_size if kernel_size is not None else cfg.blur.kernel_size,
    )
    img = load_png(image)
    save_png(apply_blur(to_value_image(img), spec), out)
    click.echo(out)


@main.command()
@click.option("--reference", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--x", type=int, required=True, help="Hover pixel column.")
@click.option("--y", type=int, required=True, help="Hover pixel row.")
@click.option("--k", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--mode", type=click.Choice(["color", "value"]), default="color")
@click.option("--out", type=click.Path(dir_okay=False), default="isolated.png")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def isolate(reference, x, y, k, seed, mode, out, config_path):
    """Show only the dominant color the hovered pixel belongs to."""
    cfg = _load_app_config(config_path).defaults
    img = load_png(reference)
    palette = extract_dominant(
        img,
        mode=mode,
        k=k if k is not None else cfg.palette_k,
        seed=seed if seed is not None else cfg.ransac.seed,
        source="reference",
    )
    save_png(isolate_color_preview(img, palette, (x, y)), out)
    click.echo(out)


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--persist-dir", type=click.Path(file_okay=False), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_with_options(provider_options)
def serve(
    host,
    port,
    persist_dir,
    config_path,
    provider_kind,
    provider_path,
    provider_url,
    provider_timeout,
):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app_cfg = _load_app_config(config_path)
    app_cfg = replace(
        app_cfg,
        host=host or app_cfg.host,
        port=port if port is not None else app_cfg.port,
        persist_dir=persist_dir or app_cfg.persist_dir,
        provider_kind=provider_kind or app_cfg.provider_kind,
        provider_path=provider_path or app_cfg.provider_path,
        provider_url=provider_url or app_cfg.provider_url,
        provider_timeout=(
            provider_timeout if provider_timeout is not None else app_cfg.provider_timeout
        ),
    )
    uvicorn.run(create_app(app_cfg), host=app_cfg.host, port=app_cfg.port)


if __name__ == "__main__":
    main()
