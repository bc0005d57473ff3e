"""Accuracy metrics, weight-sensitivity sweeps, force-equilibrium profiles
and region intensity histograms."""

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .engine import compute_forces, region_stats, track_video
from .model import (
    Circle,
    DegenerateRegionError,
    EngineConfig,
    Frame,
    ParameterError,
    sample_circle,
)

HISTOGRAM_BINS = 64


@dataclass(frozen=True)
class MetricReport:
    """Error statistics of an estimated diameter series against a reference.

    Errors are estimate minus reference; ``std_error`` is the population
    standard deviation. Units follow the input series (typically cm).
    """

    rms_error: float
    mean_error: float
    std_error: float
    max_abs_error: float
    est_max: float
    est_min: float
    ref_max: float
    ref_min: float
    frames_used: tuple


@dataclass(frozen=True)
class ProfilePoint:
    """Mean contour force at one offset of the probing circle."""

    offset: float
    mean_force: float


def compute_metrics(
    estimates, reference, frame_range: Optional[tuple] = None
) -> MetricReport:
    """Compare two equal-length diameter series over an index range.

    ``frame_range`` is a half-open (start, stop); None means the whole
    series.
    """
    est = np.asarray(estimates, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if est.shape != ref.shape or est.ndim != 1:
        raise ParameterError("estimate and reference series must be equal-length 1-D")
    if frame_range is None:
        frame_range = (0, est.size)
    start, stop = int(frame_range[0]), int(frame_range[1])
    if not (0 <= start < stop <= est.size):
        raise ParameterError(f"empty or invalid range {start}:{stop} for {est.size} frames")
    est = est[start:stop]
    ref = ref[start:stop]
    err = est - ref
    return MetricReport(
        rms_error=float(np.sqrt(np.mean(err * err))),
        mean_error=float(err.mean()),
        std_error=float(err.std()),
        max_abs_error=float(np.abs(err).max()),
        est_max=float(est.max()),
        est_min=float(est.min()),
        ref_max=float(ref.max()),
        ref_min=float(ref.min()),
        frames_used=(start, stop),
    )


def alpha_sweep(
    frames: Sequence[Frame],
    seed: tuple,
    alphas: Sequence[float],
    reference,
    config: Optional[EngineConfig] = None,
):
    """Track the video once per force weight and report the RMS error of the
    pixel diameter series against the reference.

    Returns [(alpha, rms or None), ...]; a sweep entry that fails outright
    records None.
    """
    if config is None:
        config = EngineConfig()
    alphas = list(alphas)
    if any(a <= 0 for a in alphas) or sorted(alphas) != alphas:
        raise ParameterError("alphas must be positive and sorted ascending")
    ref = np.asarray(reference, dtype=np.float64)
    results = []
    for alpha in alphas:
        try:
            track = track_video(frames, seed, replace(config, alpha=alpha))
            est = np.array([fr.diameter_px for fr in track.per_frame])
            rms = compute_metrics(est, ref).rms_error
        except (DegenerateRegionError, ParameterError):
            rms = None
        results.append((alpha, rms))
    return results


def functional_profile(
    frame: Frame,
    truth_circle: Circle,
    axis: str,
    offsets: Sequence[float],
    config: Optional[EngineConfig] = None,
):
    """Mean contour force versus a single perturbation of the true circle.

    ``axis`` is "dx" or "dy" (offsets in pixels added to the center) or
    "diameter" (offsets are diameter ratios; 1.0 probes the true circle).
    The force is averaged along the perturbed degree of freedom: the plain
    mean for the diameter axis (the radius update), the mean force
    component along x or y for the center axes (the center update). The
    profile's zero crossing locates the evolution equilibrium.
    """
    if config is None:
        config = EngineConfig()
    if axis not in ("dx", "dy", "diameter"):
        raise ParameterError(f"axis must be dx, dy or diameter, got {axis!r}")
    points = []
    for offset in offsets:
        if axis == "dx":
            probe = Circle(truth_circle.x + offset, truth_circle.y, truth_circle.radius)
        elif axis == "dy":
            probe = Circle(truth_circle.x, truth_circle.y + offset, truth_circle.radius)
        else:
            probe = Circle(truth_circle.x, truth_circle.y, truth_circle.radius * offset)
        stats = region_stats(frame, probe, config.region_policy)
        contour = sample_circle(probe, config.sample_count)
        forces = compute_forces(frame, contour, stats, config).forces
        if axis == "dx":
            mean_force = (forces * np.cos(contour.angles)).mean()
        elif axis == "dy":
            mean_force = (forces * np.sin(contour.angles)).mean()
        else:
            mean_force = forces.mean()
        points.append(ProfilePoint(offset=float(offset), mean_force=float(mean_force)))
    return points


def intensity_histogram(
    frame: Frame, circle: Circle, scale: float = 1.0, bins: int = HISTOGRAM_BINS
):
    """Normalized intensity histogram of the pixels inside a scaled circle.

    The circle is scaled about its own center. Returns (pdf, bin_edges)
    with the pdf summing to 1 over ``bins`` equal bins spanning [0, 1].
    """
    radius = circle.radius * scale
    if radius <= 0:
        raise ParameterError("scaled radius must be positive")
    intens = frame.intensities
    h, w = intens.shape
    xs = np.arange(w, dtype=np.float64) - circle.x
    ys = np.arange(h, dtype=np.float64) - circle.y
    mask = xs[np.newaxis, :] ** 2 + ys[:, np.newaxis] ** 2 <= radius * radius
    values = intens[mask]
    if values.size == 0:
        raise DegenerateRegionError("scaled circle contains no pixels")
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    return counts / values.size, edges
