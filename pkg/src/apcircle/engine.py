"""Region statistics, evolution force laws, closed-form circle updates and
per-frame/whole-video tracking.

The circle is driven by scalar forces evaluated at its contour samples;
positive force displaces a sample outward along its normal. The new circle
after a force step is the exact least-squares fit to the displaced samples,
which reduces to averaging: the center moves by the mean force vector and
the radius by the mean force value. :func:`fit_circle_direct` solves the
same fit numerically and serves as an independent cross-check.
"""

from dataclasses import dataclass
import math
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernel
from .model import (
    ANNULUS,
    CONTRAST,
    MEAN,
    VARIANCE,
    Circle,
    DegenerateRegionError,
    EngineConfig,
    ForceSet,
    Frame,
    ParameterError,
    RegionPolicy,
    RegionStats,
    SampledContour,
    bilinear_many,
    sample_circle,
)

# The force law is calibrated for 8-bit intensity units. Frames store
# normalized [0, 1] values and every functional is quadratic in intensity,
# so forces carry a fixed 255**2 conversion factor.
INTENSITY_UNIT = 255.0
_FORCE_GAIN = INTENSITY_UNIT * INTENSITY_UNIT

_FUNCTIONAL_IDS = {
    CONTRAST: _kernel.FUNCTIONAL_CONTRAST,
    MEAN: _kernel.FUNCTIONAL_MEAN,
    VARIANCE: _kernel.FUNCTIONAL_VARIANCE,
}


@dataclass(frozen=True)
class FrameResult:
    """Outcome of evolving the circle on one frame."""

    circle: Circle
    diameter_px: float
    diameter_cm: float
    iterations: int
    converged: bool
    max_final_force: float
    radius_clamped: bool = False
    error: Optional[str] = None


@dataclass(frozen=True)
class TrackResult:
    """Per-frame results of tracking one video from a seed click."""

    per_frame: list
    seed: tuple
    config: EngineConfig


def region_stats(frame: Frame, circle: Circle, policy: RegionPolicy) -> RegionStats:
    """Intensity mean/variance and pixel counts inside and outside a circle.

    Membership is a pixel-center test: a pixel (x, y) is inside when
    (x - xc)^2 + (y - yc)^2 <= radius^2. The outside region is either the
    full frame complement or the annulus radius < r <= annulus_scale *
    radius, clipped to the frame.
    """
    intens = frame.intensities
    h, w = intens.shape
    xs = np.arange(w, dtype=np.float64) - circle.x
    ys = np.arange(h, dtype=np.float64) - circle.y
    r2 = xs[np.newaxis, :] ** 2 + ys[:, np.newaxis] ** 2
    inside = r2 <= circle.radius * circle.radius
    if policy.mode == ANNULUS:
        outer = policy.annulus_scale * circle.radius
        outside = ~inside & (r2 <= outer * outer)
    else:
        outside = ~inside

    in_vals = intens[inside]
    out_vals = intens[outside]
    if in_vals.size == 0 or out_vals.size == 0:
        raise DegenerateRegionError(
            f"empty region: {in_vals.size} pixels inside, {out_vals.size} outside"
        )
    return RegionStats(
        mean_inside=float(in_vals.mean()),
        mean_outside=float(out_vals.mean()),
        var_inside=float(in_vals.var()),
        var_outside=float(out_vals.var()),
        area_inside=int(in_vals.size),
        area_outside=int(out_vals.size),
    )


def force_contrast(mean_in, mean_out, intensity, alpha):
    """Area-free contrast force alpha*(u - v)*(2*I - u - v).

    Positive values displace the sample outward. Vanishes when the sample
    intensity sits midway between the two region means.
    """
    return alpha * (mean_in - mean_out) * (2.0 * intensity - mean_in - mean_out)


def force_mean(mean_in, mean_out, intensity, area_in, area_out, alpha):
    """Mean-separation force alpha*(u - v)*((I - u)/A_in + (I - v)/A_out)."""
    return (
        alpha
        * (mean_in - mean_out)
        * ((intensity - mean_in) / area_in + (intensity - mean_out) / area_out)
    )


def force_variance(mean_in, mean_out, var_in, var_out, intensity, area_in, area_out, alpha):
    """Variance-balance force built from the second moments of each region."""
    i2 = intensity * intensity
    return alpha * (
        (i2 - mean_in * mean_in - var_in) / area_in
        - (i2 - mean_out * mean_out - var_out) / area_out
    )


def compute_forces(
    frame: Frame, contour: SampledContour, stats: RegionStats, config: EngineConfig
) -> ForceSet:
    """Evaluate the configured force law at every contour sample.

    Sample intensities come from bilinear interpolation at the contour
    points; the result carries the 8-bit intensity-unit gain.
    """
    pts = contour.points
    intensity = bilinear_many(frame.intensities, pts[:, 0], pts[:, 1])
    gain = config.alpha * _FORCE_GAIN
    if config.functional == CONTRAST:
        forces = force_contrast(stats.mean_inside, stats.mean_outside, intensity, gain)
    elif config.functional == MEAN:
        forces = force_mean(
            stats.mean_inside,
            stats.mean_outside,
            intensity,
            stats.area_inside,
            stats.area_outside,
            gain,
        )
    else:
        forces = force_variance(
            stats.mean_inside,
            stats.mean_outside,
            stats.var_inside,
            stats.var_outside,
            intensity,
            stats.area_inside,
            stats.area_outside,
            gain,
        )
    return ForceSet(forces=np.asarray(forces, dtype=np.float64), angles=contour.angles)


def update_circle(circle: Circle, forces: ForceSet, min_radius: float = 0.0) -> Circle:
    """Apply one force step: center += mean force vector, radius += mean force.

    This is the closed-form minimizer of the least-squares circle fit to the
    displaced samples. The radius is clamped below at ``min_radius``.
    """
    f = forces.forces
    cos_t = np.cos(forces.angles)
    sin_t = np.sin(forces.angles)
    k = f.size
    new_r = circle.radius + f.sum() / k
    if new_r < min_radius:
        new_r = min_radius
    return Circle(
        x=circle.x + (f * cos_t).sum() / k,
        y=circle.y + (f * sin_t).sum() / k,
        radius=new_r,
    )


def fit_circle_direct(points, angles) -> Circle:
    """Least-squares circle through samples with known polar angles.

    Minimizes sum_k (x_k - xc - R*cos(a_k))^2 + (y_k - yc - R*sin(a_k))^2
    as an unconstrained linear problem in (xc, yc, R). Independent of
    :func:`update_circle`; used to cross-check it.
    """
    pts = np.asarray(points, dtype=np.float64)
    ang = np.asarray(angles, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] != ang.size:
        raise ParameterError("points must be (K, 2) with matching angles")
    k = pts.shape[0]
    if k < 3:
        raise ParameterError("need at least 3 points to fit a circle")
    design = np.zeros((2 * k, 3))
    rhs = np.empty(2 * k)
    design[0::2, 0] = 1.0
    design[0::2, 2] = np.cos(ang)
    design[1::2, 1] = 1.0
    design[1::2, 2] = np.sin(ang)
    rhs[0::2] = pts[:, 0]
    rhs[1::2] = pts[:, 1]
    sol, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < 3:
        raise ParameterError("rank-deficient circle fit")
    return Circle(x=float(sol[0]), y=float(sol[1]), radius=float(sol[2]))


def _prefix_tables(intens: np.ndarray):
    h, w = intens.shape
    prefix_sum = np.zeros((h, w + 1), dtype=np.float64)
    prefix_sq = np.zeros((h, w + 1), dtype=np.float64)
    np.cumsum(intens, axis=1, out=prefix_sum[:, 1:])
    np.cumsum(intens * intens, axis=1, out=prefix_sq[:, 1:])
    return prefix_sum, prefix_sq


def converge_frame(frame: Frame, init: Circle, config: EngineConfig) -> FrameResult:
    """Evolve a circle on one frame until the largest force drops below the
    convergence threshold or the iteration budget runs out.

    Also stops early when the circle parameters exactly repeat, which can
    only reproduce the same state until the cap; the returned circle is the
    one the full run would yield.
    """
    if init.radius < config.min_radius:
        raise ParameterError("initial radius below min_radius")
    if not (0 <= init.x <= frame.width - 1 and 0 <= init.y <= frame.height - 1):
        raise ParameterError("initial center outside frame")
    intens = frame.intensities
    prefix_sum, prefix_sq = _prefix_tables(intens)
    contour = sample_circle(init, config.sample_count)
    cos_t = np.cos(contour.angles)
    sin_t = np.sin(contour.angles)
    xc, yc, r, iterations, status, max_force, clamped = _kernel.evolve(
        intens,
        prefix_sum,
        prefix_sq,
        float(prefix_sum[:, -1].sum()),
        float(prefix_sq[:, -1].sum()),
        float(init.x),
        float(init.y),
        float(init.radius),
        cos_t,
        sin_t,
        config.alpha * _FORCE_GAIN,
        _FUNCTIONAL_IDS[config.functional],
        config.region_policy.mode == ANNULUS,
        float(config.region_policy.annulus_scale),
        float(config.convergence_force),
        int(config.max_iterations),
        float(config.min_radius),
    )
    if status == _kernel.STATUS_DEGENERATE:
        raise DegenerateRegionError(
            f"region emptied at iteration {iterations} "
            f"(circle x={xc:.2f} y={yc:.2f} r={r:.2f})"
        )
    circle = Circle(x=float(xc), y=float(yc), radius=float(r))
    return FrameResult(
        circle=circle,
        diameter_px=circle.diameter,
        diameter_cm=circle.diameter * frame.pixel_spacing_cm,
        iterations=int(iterations),
        converged=status == _kernel.STATUS_CONVERGED,
        max_final_force=float(max_force),
        radius_clamped=bool(clamped),
    )


def track_video(
    frames: Sequence[Frame],
    seed: tuple,
    config: EngineConfig,
    on_frame: Optional[Callable[[int, FrameResult], None]] = None,
) -> TrackResult:
    """Track the vessel across a frame sequence from one seed click.

    Frame 0 starts at a circle of ``config.init_radius`` centered on the
    seed; each later frame starts from the previous frame's result. A frame
    that errors out is recorded as non-converged and the next frame re-seeds
    from the last successful circle. ``on_frame`` (if given) is called with
    (index, FrameResult) as each frame completes.
    """
    if len(frames) == 0:
        raise ParameterError("no frames to track")
    first = frames[0]
    sx, sy = float(seed[0]), float(seed[1])
    if not (0 <= sx <= first.width - 1 and 0 <= sy <= first.height - 1):
        raise ParameterError("seed out of bounds")
    last_good = Circle(x=sx, y=sy, radius=config.init_radius)
    results = []
    for index, frame in enumerate(frames):
        init = last_good
        try:
            result = converge_frame(frame, init, config)
            last_good = result.circle
        except (DegenerateRegionError, ParameterError) as exc:
            result = FrameResult(
                circle=init,
                diameter_px=init.diameter,
                diameter_cm=init.diameter * frame.pixel_spacing_cm,
                iterations=0,
                converged=False,
                max_final_force=math.nan,
                error=str(exc),
            )
        results.append(result)
        if on_frame is not None:
            on_frame(index, result)
    return TrackResult(per_frame=results, seed=(sx, sy), config=config)
