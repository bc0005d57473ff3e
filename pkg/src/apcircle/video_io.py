"""Frame and video I/O: image directories, phantom spec files, track CSVs
and overlay rendering.

A video source is either a directory of numbered grayscale images (8- or
16-bit PNG/PGM, sorted by the numeric index embedded in each filename) or
a phantom spec file, which is rendered on the fly.
"""

import csv
import io
import json
from pathlib import Path
import re
from typing import Optional, Sequence

import numpy as np
from PIL import Image, ImageDraw

from .engine import FrameResult, TrackResult
from .model import Circle, Frame, ParameterError
from .phantom import SCAN_DEPTH_CM, PhantomTruth, load_phantom_spec, render_phantom

IMAGE_SUFFIXES = (".png", ".pgm")
SIDECAR_NAME = "metadata.json"

TRACK_CSV_COLUMNS = (
    "frame_index",
    "x_c",
    "y_c",
    "r_px",
    "diameter_px",
    "diameter_cm",
    "iterations",
    "converged",
)

TRUTH_CSV_COLUMNS = ("frame_index", "x_c", "y_c", "d_ap_px", "d_ap_cm", "a_px", "b_px")

CIRCLE_COLOR = (255, 220, 0)
DIAMETER_COLOR = (0, 220, 80)


def _numeric_key(path: Path):
    digits = re.findall(r"\d+", path.stem)
    return (int(digits[-1]) if digits else -1, path.name)


def _decode_image(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        mode = img.mode
        arr = np.asarray(img)
    if mode == "L":
        return arr.astype(np.float64) / 255.0
    if mode in ("I;16", "I"):
        return arr.astype(np.float64) / 65535.0
    raise ParameterError(f"{path.name}: unsupported image mode {mode!r} (need 8/16-bit grayscale)")


def load_video(path, pixel_spacing_cm: Optional[float] = None):
    """Load a video source into a list of :class:`Frame`.

    Directories are read as numbered grayscale images with intensities
    normalized by the source bit depth; a file is parsed as a phantom spec
    and rendered. Pixel spacing comes from the explicit argument, then a
    ``metadata.json`` sidecar, then the 19 cm scan-depth heuristic.
    """
    source = Path(path)
    if source.is_file():
        spec = load_phantom_spec(source)
        if pixel_spacing_cm is not None:
            from dataclasses import replace

            spec = replace(spec, pixel_spacing_cm=pixel_spacing_cm)
        frames, _ = render_phantom(spec)
        return frames
    if not source.is_dir():
        raise ParameterError(f"video source not found: {source}")

    files = sorted(
        (p for p in source.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=_numeric_key,
    )
    if not files:
        raise ParameterError(f"no frames found in {source}")

    if pixel_spacing_cm is None:
        sidecar = source / SIDECAR_NAME
        if sidecar.exists():
            meta = json.loads(sidecar.read_text())
            pixel_spacing_cm = float(meta["pixel_spacing_cm"])

    frames = []
    shape = None
    for file in files:
        arr = _decode_image(file)
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise ParameterError(
                f"{file.name}: frame size {arr.shape[1]}x{arr.shape[0]} differs "
                f"from first frame {shape[1]}x{shape[0]}"
            )
        spacing = pixel_spacing_cm if pixel_spacing_cm is not None else SCAN_DEPTH_CM / arr.shape[0]
        frames.append(Frame(arr, pixel_spacing_cm=spacing))
    return frames


def save_frames(frames: Sequence[Frame], directory) -> None:
    """Write frames as numbered 16-bit grayscale PNGs plus the spacing sidecar."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for index, frame in enumerate(frames):
        arr = np.round(frame.intensities * 65535.0).astype(np.uint16)
        Image.fromarray(arr).save(out / f"frame_{index:05d}.png")
    (out / SIDECAR_NAME).write_text(
        json.dumps({"pixel_spacing_cm": frames[0].pixel_spacing_cm}) + "\n"
    )


def frame_results_csv_text(frame_results: Sequence[FrameResult]) -> str:
    """Serialize per-frame results as CSV, one row per frame.

    Floats use shortest-round-trip formatting so parsing the CSV back
    reproduces them exactly.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACK_CSV_COLUMNS)
    for index, fr in enumerate(frame_results):
        writer.writerow(
            [
                index,
                repr(fr.circle.x),
                repr(fr.circle.y),
                repr(fr.circle.radius),
                repr(fr.diameter_px),
                repr(fr.diameter_cm),
                fr.iterations,
                "true" if fr.converged else "false",
            ]
        )
    return buf.getvalue()


def track_csv_text(result: TrackResult) -> str:
    return frame_results_csv_text(result.per_frame)


def write_track_csv(result: TrackResult, path) -> None:
    Path(path).write_text(track_csv_text(result))


def read_csv_column(path, column: str) -> np.ndarray:
    """Read one numeric column from a CSV file with a header row."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise ParameterError(f"{path}: no column {column!r}")
        values = [float(row[column]) for row in reader]
    if not values:
        raise ParameterError(f"{path}: no data rows")
    return np.asarray(values)


def truth_csv_text(truth: PhantomTruth, pixel_spacing_cm: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRUTH_CSV_COLUMNS)
    for index in range(len(truth.ap_diameters)):
        d_px = truth.ap_diameters[index]
        writer.writerow(
            [
                index,
                repr(float(truth.centers[index, 0])),
                repr(float(truth.centers[index, 1])),
                repr(float(d_px)),
                repr(float(d_px * pixel_spacing_cm)),
                repr(float(truth.axes[index, 0])),
                repr(float(truth.axes[index, 1])),
            ]
        )
    return buf.getvalue()


def frame_to_image(frame: Frame) -> Image.Image:
    """8-bit grayscale PIL image of a frame (display helper)."""
    return Image.fromarray(np.round(frame.intensities * 255.0).astype(np.uint8), mode="L")


def render_overlay(frame: Frame, circle: Circle) -> np.ndarray:
    """Draw the circle outline and the vertical AP-diameter segment.

    Returns an (H, W, 3) uint8 RGB array; geometry partially outside the
    frame is clipped by the rasterizer.
    """
    img = frame_to_image(frame).convert("RGB")
    draw = ImageDraw.Draw(img)
    x, y, r = circle.x, circle.y, circle.radius
    draw.ellipse((x - r, y - r, x + r, y + r), outline=CIRCLE_COLOR, width=1)
    draw.line((x, y - r, x, y + r), fill=DIAMETER_COLOR, width=1)
    return np.asarray(img)


def encode_png(array: np.ndarray) -> bytes:
    """PNG-encode an 8-bit grayscale or RGB array."""
    buf = io.BytesIO()
    Image.fromarray(array).save(buf, format="PNG")
    return buf.getvalue()


def frame_result_dict(index: int, fr: FrameResult) -> dict:
    return {
        "frame_index": index,
        "x_c": fr.circle.x,
        "y_c": fr.circle.y,
        "r_px": fr.circle.radius,
        "diameter_px": fr.diameter_px,
        "diameter_cm": fr.diameter_cm,
        "iterations": fr.iterations,
        "converged": fr.converged,
    }
