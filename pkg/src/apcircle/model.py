"""Domain types and geometric primitives shared by the whole package.

Coordinate convention: x is the column index, y is the row index, so a
frame pixel (x, y) lives at ``intensities[y, x]``. The anterior-posterior
axis is vertical (y).
"""

from dataclasses import dataclass, field
import math

import numpy as np


class ParameterError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


class DegenerateRegionError(RuntimeError):
    """Raised when a region used for statistics contains no pixels."""


@dataclass(frozen=True)
class Frame:
    """A single grayscale video frame with normalized intensities.

    Parameters
    ----------
    intensities : np.ndarray
        (height, width) array of intensities in [0, 1]. Stored as a
        read-only float64 copy.
    pixel_spacing_cm : float
        Physical size of one (isotropic) pixel in centimetres.
    """

    intensities: np.ndarray
    pixel_spacing_cm: float = 1.0

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.intensities, dtype=np.float64))
        if arr.ndim != 2:
            raise ParameterError(f"frame must be 2-D, got shape {arr.shape}")
        h, w = arr.shape
        if h < 16 or w < 16:
            raise ParameterError(f"frame must be at least 16x16, got {w}x{h}")
        if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
            raise ParameterError("frame intensities must be finite and within [0, 1]")
        if not (self.pixel_spacing_cm > 0):
            raise ParameterError("pixel_spacing_cm must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "intensities", arr)

    @property
    def width(self) -> int:
        return self.intensities.shape[1]

    @property
    def height(self) -> int:
        return self.intensities.shape[0]


@dataclass(frozen=True)
class Circle:
    """A circle contour: center (x, y) and radius, all in pixels."""

    x: float
    y: float
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ParameterError("circle center must be finite")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ParameterError("circle radius must be positive")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius


@dataclass(frozen=True)
class SampledContour:
    """A circle sampled at uniformly spaced polar angles.

    ``points[k] == center + radius * normals[k]`` exactly (same float
    expressions), with ``normals[k] = (cos(angles[k]), sin(angles[k]))``.
    """

    circle: Circle
    angles: np.ndarray
    normals: np.ndarray
    points: np.ndarray

    @property
    def sample_count(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class RegionStats:
    """First- and second-order intensity statistics inside/outside a contour."""

    mean_inside: float
    mean_outside: float
    var_inside: float
    var_outside: float
    area_inside: int
    area_outside: int


@dataclass(frozen=True)
class ForceSet:
    """Per-sample scalar displacement forces along the outward normals."""

    forces: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.forces, dtype=np.float64)
        a = np.asarray(self.angles, dtype=np.float64)
        if f.shape != a.shape or f.ndim != 1:
            raise ParameterError("forces and angles must be matching 1-D arrays")
        if not np.isfinite(f).all():
            raise ParameterError("forces must be finite")
        object.__setattr__(self, "forces", f)
        object.__setattr__(self, "angles", a)


FULL_COMPLEMENT = "full-complement"
ANNULUS = "annulus"


@dataclass(frozen=True)
class RegionPolicy:
    """Definition of the "outside" region used for exterior statistics.

    ``full-complement`` uses every frame pixel not inside the circle;
    ``annulus`` uses the ring radius < r <= annulus_scale * radius,
    clipped to the frame.
    """

    mode: str = FULL_COMPLEMENT
    annulus_scale: float = 1.5

    def __post_init__(self):
        if self.mode not in (FULL_COMPLEMENT, ANNULUS):
            raise ParameterError(f"unknown region policy mode: {self.mode!r}")
        if not (self.annulus_scale > 1.0):
            raise ParameterError("annulus_scale must be > 1")


CONTRAST = "contrast"
MEAN = "mean"
VARIANCE = "variance"
FUNCTIONALS = (CONTRAST, MEAN, VARIANCE)


@dataclass(frozen=True)
class EngineConfig:
    """Tunable parameters of the circle-evolution engine.

    The defaults are the working point used throughout: ``alpha`` weights
    the evolution force, ``sample_count`` contour samples, a 6-pixel
    initial radius, a 5000-iteration cap and a 1e-3-pixel largest-force
    convergence threshold.
    """

    alpha: float = 1e-4
    sample_count: int = 32
    init_radius: float = 6.0
    max_iterations: int = 5000
    convergence_force: float = 1e-3
    min_radius: float = 2.0
    region_policy: RegionPolicy = field(default_factory=RegionPolicy)
    functional: str = CONTRAST

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ParameterError("alpha must be positive")
        if self.sample_count < 8:
            raise ParameterError("sample_count must be at least 8")
        if not (self.init_radius >= self.min_radius):
            raise ParameterError("init_radius must be at least min_radius")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be at least 1")
        if not (self.convergence_force > 0):
            raise ParameterError("convergence_force must be positive")
        if self.functional not in FUNCTIONALS:
            raise ParameterError(f"unknown functional: {self.functional!r}")


def sample_circle(circle: Circle, count: int) -> SampledContour:
    """Sample a circle at ``count`` uniformly spaced polar angles.

    Angles are 2*pi*k/count for k = 0..count-1, each with unit outward
    normal (cos, sin) and Cartesian point center + radius * normal.
    """
    if count < 2:
        raise ParameterError("need at least 2 sample points")
    k = np.arange(count, dtype=np.float64)
    angles = 2.0 * np.pi * k / count
    cos_t = np.cos(angles)
    sin_t = np.sin(angles)
    normals = np.column_stack((cos_t, sin_t))
    points = np.column_stack(
        (circle.x + circle.radius * cos_t, circle.y + circle.radius * sin_t)
    )
    for arr in (angles, normals, points):
        arr.setflags(write=False)
    return SampledContour(circle=circle, angles=angles, normals=normals, points=points)


def bilinear_intensity(frame: Frame, x: float, y: float) -> float:
    """Bilinear interpolation of the frame at a sub-pixel position.

    Coordinates outside the frame are clamped to the border pixel, so the
    function is total. Integer coordinates return the stored pixel value.
    """
    return float(
        bilinear_many(
            frame.intensities, np.asarray([x], dtype=np.float64), np.asarray([y], dtype=np.float64)
        )[0]
    )


def bilinear_many(intensities: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized form of :func:`bilinear_intensity` over coordinate arrays."""
    h, w = intensities.shape
    x = np.clip(xs, 0.0, w - 1.0)
    y = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(x).astype(np.intp)
    y0 = np.floor(y).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = intensities[y0, x0] * (1.0 - fx) + intensities[y0, x1] * fx
    bottom = intensities[y1, x0] * (1.0 - fx) + intensities[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy
