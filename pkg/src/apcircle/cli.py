"""Command-line interface: track videos, render phantoms, evaluate CSVs,
probe force profiles and serve the annotation UI."""

import os
from pathlib import Path

import click

from .engine import track_video
from .evaluation import compute_metrics, functional_profile
from .filters import FILTER_KINDS, NONE as FILTER_NONE, FilterSpec, apply_filter
from .kvtext import parse_kv_text
from .model import (
    Circle,
    DegenerateRegionError,
    EngineConfig,
    ParameterError,
    RegionPolicy,
)
from .phantom import load_phantom_spec, render_phantom
from .video_io import (
    load_video,
    read_csv_column,
    render_overlay,
    save_frames,
    track_csv_text,
    truth_csv_text,
)

_CONFIG_INT_KEYS = {"sample_count", "max_iterations"}
_CONFIG_FLOAT_KEYS = {
    "alpha",
    "init_radius",
    "convergence_force",
    "min_radius",
    "annulus_scale",
}


def load_engine_config(path) -> EngineConfig:
    """Engine configuration from a flat key-value file.

    Keys mirror :class:`EngineConfig` fields plus ``region_policy``
    (full-complement or annulus) and ``annulus_scale``.
    """
    entries = parse_kv_text(Path(path).read_text())
    kwargs = {}
    policy_mode = None
    annulus_scale = None
    for key, values in entries.items():
        value = values[-1]
        if key in _CONFIG_INT_KEYS:
            kwargs[key] = int(value)
        elif key == "annulus_scale":
            annulus_scale = float(value)
        elif key in _CONFIG_FLOAT_KEYS:
            kwargs[key] = float(value)
        elif key == "functional":
            kwargs[key] = value
        elif key == "region_policy":
            policy_mode = value
        else:
            raise ParameterError(f"unknown engine config key: {key!r}")
    if policy_mode is not None or annulus_scale is not None:
        policy_kwargs = {}
        if policy_mode is not None:
            policy_kwargs["mode"] = policy_mode
        if annulus_scale is not None:
            policy_kwargs["annulus_scale"] = annulus_scale
        kwargs["region_policy"] = RegionPolicy(**policy_kwargs)
    return EngineConfig(**kwargs)


def _parse_point(text: str):
    try:
        x_str, y_str = text.split(",")
        return float(x_str), float(y_str)
    except ValueError:
        raise click.ClickException(f"expected X,Y, got {text!r}")


def _fail_on(exc: Exception):
    raise click.ClickException(str(exc))


@click.group()
def main():
    """Estimate and track the vessel AP-diameter in grayscale video."""


@main.command()
@click.option("--input", "source", required=True, help="Frame directory or phantom spec file.")
@click.option("--seed", required=True, help="Seed click inside the vessel, as X,Y pixels.")
@click.option("--config", "config_path", default=None, help="Engine config key-value file.")
@click.option(
    "--filter",
    "filter_kind",
    default=FILTER_NONE,
    type=click.Choice(FILTER_KINDS),
    help="Speckle pre-filter.",
)
@click.option("--out-csv", "out_csv", required=True, help="Per-frame result CSV path.")
@click.option("--overlay", "overlay_dir", default=None, help="Directory for overlay PNGs.")
@click.option("--pixel-spacing", "pixel_spacing", type=float, default=None, help="cm per pixel.")
def track(source, seed, config_path, filter_kind, out_csv, overlay_dir, pixel_spacing):
    """Track a video from a seed click and write one CSV row per frame."""
    try:
        config = load_engine_config(config_path) if config_path else EngineConfig()
        frames = load_video(source, pixel_spacing_cm=pixel_spacing)
        if filter_kind != FILTER_NONE:
            spec = FilterSpec(kind=filter_kind)
            frames = [apply_filter(f, spec) for f in frames]
        result = track_video(frames, _parse_point(seed), config)
    except (ParameterError, DegenerateRegionError, ValueError, OSError) as exc:
        _fail_on(exc)
    Path(out_csv).write_text(track_csv_text(result))
    if overlay_dir:
        out = Path(overlay_dir)
        out.mkdir(parents=True, exist_ok=True)
        from PIL import Image

        for index, fr in enumerate(result.per_frame):
            rgb = render_overlay(frames[index], fr.circle)
            Image.fromarray(rgb).save(out / f"overlay_{index:05d}.png")
    converged = sum(fr.converged for fr in result.per_frame)
    click.echo(f"tracked {len(result.per_frame)} frames ({converged} converged) -> {out_csv}")


@main.command()
@click.option("--spec", "spec_path", required=True, help="Phantom spec key-value file.")
@click.option("--out", "out_dir", required=True, help="Output directory.")
def phantom(spec_path, out_dir):
    """Render a phantom video to numbered PNGs plus a truth.csv."""
    try:
        spec = load_phantom_spec(spec_path)
        frames, truth = render_phantom(spec)
    except (ParameterError, ValueError, OSError) as exc:
        _fail_on(exc)
    save_frames(frames, out_dir)
    (Path(out_dir) / "truth.csv").write_text(truth_csv_text(truth, spec.spacing_cm))
    click.echo(f"rendered {len(frames)} frames -> {out_dir}")


_REPORT_FIELDS = (
    "rms_error",
    "mean_error",
    "std_error",
    "max_abs_error",
    "est_max",
    "est_min",
    "ref_max",
    "ref_min",
)


@main.command(name="eval")
@click.option("--est", "est_path", required=True, help="Estimated series CSV.")
@click.option("--ref", "ref_path", required=True, help="Reference series CSV.")
@click.option("--est-col", default="diameter_cm", show_default=True)
@click.option("--ref-col", default="d_ap_cm", show_default=True)
@click.option("--range", "frame_range", default=None, help="Half-open frame range A:B.")
@click.option("--out-csv", "out_csv", default=None, help="Also write the report as CSV.")
def eval_cmd(est_path, ref_path, est_col, ref_col, frame_range, out_csv):
    """Compare two diameter series and print the error metrics."""
    try:
        est = read_csv_column(est_path, est_col)
        ref = read_csv_column(ref_path, ref_col)
        rng = None
        if frame_range:
            a_str, b_str = frame_range.split(":")
            rng = (int(a_str), int(b_str))
        report = compute_metrics(est, ref, rng)
    except (ParameterError, ValueError, OSError) as exc:
        _fail_on(exc)
    click.echo(f"frames_used = {report.frames_used[0]}:{report.frames_used[1]}")
    for name in _REPORT_FIELDS:
        click.echo(f"{name} = {getattr(report, name):.6g}")
    if out_csv:
        header = "frames_used," + ",".join(_REPORT_FIELDS)
        row = f"{report.frames_used[0]}:{report.frames_used[1]}," + ",".join(
            repr(getattr(report, name)) for name in _REPORT_FIELDS
        )
        Path(out_csv).write_text(header + "\n" + row + "\n")


@main.command()
@click.option("--input", "source", required=True, help="Frame directory or phantom spec file.")
@click.option("--frame", "frame_index", type=int, default=0, show_default=True)
@click.option("--axis", type=click.Choice(["dx", "dy", "diameter"]), required=True)
@click.option("--offsets", required=True, help="Comma-separated offsets.")
@click.option("--circle", "circle_text", default=None, help="Probe circle X,Y,R (defaults to phantom truth).")
def profile(source, frame_index, axis, offsets, circle_text):
    """Print the mean contour force at each offset of a probing circle."""
    try:
        frames = load_video(source)
        if not (0 <= frame_index < len(frames)):
            raise ParameterError(f"frame {frame_index} outside 0..{len(frames) - 1}")
        if circle_text is not None:
            x_str, y_str, r_str = circle_text.split(",")
            circle = Circle(float(x_str), float(y_str), float(r_str))
        else:
            path = Path(source)
            if not path.is_file():
                raise ParameterError("--circle is required unless --input is a phantom spec")
            spec = load_phantom_spec(path)
            _, truth = render_phantom(spec)
            cx, cy = truth.centers[frame_index]
            circle = Circle(cx, cy, truth.ap_diameters[frame_index] / 2.0)
        offset_values = [float(v) for v in offsets.split(",")]
        points = functional_profile(frames[frame_index], circle, axis, offset_values)
    except (ParameterError, DegenerateRegionError, ValueError, OSError) as exc:
        _fail_on(exc)
    click.echo("offset,mean_force")
    for point in points:
        click.echo(f"{point.offset!r},{point.mean_force!r}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None, help="Defaults to $APCIRCLE_PORT or 8000.")
@click.option("--ui", "ui_dir", default=None, help="Static UI directory (default: frontend/dist if present).")
def serve(host, port, ui_dir):
    """Run the local HTTP annotation service."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("APCIRCLE_PORT", "8000"))
    if ui_dir is None:
        candidate = Path.cwd() / "frontend" / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    app = create_app(ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
