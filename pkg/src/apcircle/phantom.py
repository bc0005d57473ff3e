"""Synthetic ultrasound-like vessel videos with exact ground truth.

A phantom is a dark elliptical vessel (hypoechoic interior) in a brighter
background, with an optionally pulsating AP diameter, blurred walls,
optional wall gaps and multiplicative Rayleigh speckle. All randomness
derives from one seed; frame t uses the stream seeded by (seed, t), so
frames are reproducible individually.
"""

from dataclasses import dataclass
import math
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.ndimage import gaussian_filter

from .kvtext import parse_bool, parse_kv_text
from .model import Frame, ParameterError

SCAN_DEPTH_CM = 19.0  # default physical height of a frame


@dataclass(frozen=True)
class PhantomSpec:
    """Full description of a synthetic vessel video.

    The vessel cross-section is an ellipse with vertical (AP) semi-axis
    ``a(t) = (base_diameter + amplitude*sin(2*pi*t/period)) / 2`` and
    lateral semi-axis ``aspect_ratio * a(t)``. ``gaps`` lists angular arcs
    (start_deg, end_deg, band) where the wall step is replaced by a linear
    ramp over elliptical radius 1 +- band; angles run from the +x axis
    toward +y (downward in image coordinates).
    """

    width: int = 192
    height: int = 192
    frame_count: int = 450
    fps: float = 30.0
    center_x: float = 96.0
    center_y: float = 96.0
    base_diameter: float = 60.0
    amplitude: float = 15.0
    period: float = 150.0
    aspect_ratio: float = 1.0
    drift_x: float = 0.0
    drift_y: float = 0.0
    drift_period: float = 90.0
    mean_in: float = 0.10
    mean_out: float = 0.38
    blur_sigma: float = 2.5
    gaps: tuple = ()
    speckle: bool = True
    rayleigh_scale: float = 1.0
    rng_seed: int = 7
    pixel_spacing_cm: Optional[float] = None

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ParameterError("phantom frames must be at least 16x16")
        if self.frame_count < 1:
            raise ParameterError("frame_count must be at least 1")
        if not (0.0 <= self.mean_in <= 1.0 and 0.0 <= self.mean_out <= 1.0):
            raise ParameterError("mean_in and mean_out must lie in [0, 1]")
        if not (self.mean_in < self.mean_out):
            raise ParameterError("interior must be darker: mean_in < mean_out")
        if not (self.base_diameter - abs(self.amplitude) > 4.0):
            raise ParameterError("diameter wave must stay above 4 px")
        if not (self.period > 0 and self.drift_period > 0):
            raise ParameterError("periods must be positive")
        if not (self.aspect_ratio > 0):
            raise ParameterError("aspect_ratio must be positive")
        if self.blur_sigma < 0:
            raise ParameterError("blur_sigma must be non-negative")
        if not (self.rayleigh_scale > 0):
            raise ParameterError("rayleigh_scale must be positive")
        for gap in self.gaps:
            if len(gap) != 3 or not (0 < gap[2] < 1):
                raise ParameterError(
                    "each gap must be (start_deg, end_deg, band) with 0 < band < 1"
                )

    @property
    def spacing_cm(self) -> float:
        if self.pixel_spacing_cm is not None:
            return self.pixel_spacing_cm
        return SCAN_DEPTH_CM / self.height

    def ap_diameter(self, frame_index: int) -> float:
        return self.base_diameter + self.amplitude * math.sin(
            2.0 * math.pi * frame_index / self.period
        )

    def center(self, frame_index: int) -> tuple:
        phase = 2.0 * math.pi * frame_index / self.drift_period
        return (
            self.center_x + self.drift_x * math.sin(phase),
            self.center_y + self.drift_y * math.sin(phase),
        )


@dataclass(frozen=True)
class PhantomTruth:
    """Per-frame ground truth: vessel center, AP diameter and semi-axes."""

    centers: np.ndarray
    ap_diameters: np.ndarray
    axes: np.ndarray  # (N, 2) = (vertical a, lateral b)


def render_frame(spec: PhantomSpec, frame_index: int) -> np.ndarray:
    """Render one frame of the phantom as a (height, width) float array."""
    a = spec.ap_diameter(frame_index) / 2.0
    b = spec.aspect_ratio * a
    cx, cy = spec.center(frame_index)
    xs = (np.arange(spec.width, dtype=np.float64) - cx) / b
    ys = (np.arange(spec.height, dtype=np.float64) - cy) / a
    rho = np.sqrt(xs[np.newaxis, :] ** 2 + ys[:, np.newaxis] ** 2)
    img = np.where(rho <= 1.0, spec.mean_in, spec.mean_out)

    if spec.gaps:
        dx = np.arange(spec.width, dtype=np.float64) - cx
        dy = np.arange(spec.height, dtype=np.float64) - cy
        angle = np.degrees(
            np.arctan2(dy[:, np.newaxis], dx[np.newaxis, :])
        ) % 360.0
        contrast = spec.mean_out - spec.mean_in
        for start, end, band in spec.gaps:
            start %= 360.0
            end %= 360.0
            if start <= end:
                in_arc = (angle >= start) & (angle <= end)
            else:
                in_arc = (angle >= start) | (angle <= end)
            in_band = np.abs(rho - 1.0) <= band
            sel = in_arc & in_band
            ramp = (rho[sel] - (1.0 - band)) / (2.0 * band)
            img[sel] = spec.mean_in + np.clip(ramp, 0.0, 1.0) * contrast

    if spec.blur_sigma > 0:
        img = gaussian_filter(img, spec.blur_sigma, mode="nearest")

    if spec.speckle:
        rng = np.random.default_rng((spec.rng_seed, frame_index))
        factors = rng.rayleigh(scale=spec.rayleigh_scale, size=img.shape)
        factors /= spec.rayleigh_scale * math.sqrt(math.pi / 2.0)  # unit mean
        img = img * factors

    return np.clip(img, 0.0, 1.0)


def render_phantom(spec: PhantomSpec):
    """Render the whole video.

    Returns (frames, truth) where frames is a list of :class:`Frame` and
    truth a :class:`PhantomTruth` with one row per frame.
    """
    spacing = spec.spacing_cm
    frames = []
    centers = np.empty((spec.frame_count, 2))
    diameters = np.empty(spec.frame_count)
    axes = np.empty((spec.frame_count, 2))
    for t in range(spec.frame_count):
        frames.append(Frame(render_frame(spec, t), pixel_spacing_cm=spacing))
        centers[t] = spec.center(t)
        diameters[t] = spec.ap_diameter(t)
        axes[t] = (diameters[t] / 2.0, spec.aspect_ratio * diameters[t] / 2.0)
    truth = PhantomTruth(centers=centers, ap_diameters=diameters, axes=axes)
    return frames, truth


def truth_diameter(truth: PhantomTruth, frame_index: int) -> float:
    """Ground-truth AP diameter (pixels) for one frame."""
    n = len(truth.ap_diameters)
    if not (0 <= frame_index < n):
        raise ParameterError(f"frame index {frame_index} outside 0..{n - 1}")
    return float(truth.ap_diameters[frame_index])


# The reference video used by the acceptance suite: a 450-frame pulsating
# vessel (D = 60 + 15 sin(2 pi t / 150) px) with full-strength speckle,
# heavy wall blur and indistinct lateral walls. Calibrated so the tracker's
# error has both a noise component and a wall-gap bias, mirroring the
# working conditions the algorithm is meant for.
STANDARD_PHANTOM = PhantomSpec(
    mean_in=0.10,
    mean_out=0.36,
    blur_sigma=3.0,
    gaps=((325.0, 35.0, 0.25), (145.0, 215.0, 0.25)),
)


_INT_KEYS = {"width", "height", "frame_count", "rng_seed"}
_FLOAT_KEYS = {
    "fps",
    "center_x",
    "center_y",
    "base_diameter",
    "amplitude",
    "period",
    "aspect_ratio",
    "drift_x",
    "drift_y",
    "drift_period",
    "mean_in",
    "mean_out",
    "blur_sigma",
    "rayleigh_scale",
    "pixel_spacing_cm",
}


def parse_phantom_spec(text: str) -> PhantomSpec:
    """Build a :class:`PhantomSpec` from a flat key-value document.

    Every dataclass field is a key; ``speckle`` takes on/off and ``gap``
    may repeat with values ``start_deg:end_deg[:band]`` (band defaults
    to 0.35).
    """
    entries = parse_kv_text(text)
    kwargs: dict = {}
    gaps = []
    for key, values in entries.items():
        if key == "gap":
            for value in values:
                parts = value.split(":")
                if len(parts) not in (2, 3):
                    raise ParameterError(f"gap must be start:end[:band], got {value!r}")
                band = float(parts[2]) if len(parts) == 3 else 0.35
                gaps.append((float(parts[0]), float(parts[1]), band))
            continue
        value = values[-1]
        if key == "speckle":
            kwargs[key] = parse_bool(value)
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(value)
        else:
            raise ParameterError(f"unknown phantom spec key: {key!r}")
    if gaps:
        kwargs["gaps"] = tuple(gaps)
    return PhantomSpec(**kwargs)


def load_phantom_spec(path) -> PhantomSpec:
    return parse_phantom_spec(Path(path).read_text())
