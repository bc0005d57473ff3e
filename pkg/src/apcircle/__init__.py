"""apcircle: AP-diameter estimation and tracking in ultrasound video by
evolving a fitted circle with region-contrast forces."""

from .model import (
    ANNULUS,
    CONTRAST,
    FULL_COMPLEMENT,
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
    bilinear_intensity,
    sample_circle,
)
from .engine import (
    FrameResult,
    TrackResult,
    compute_forces,
    converge_frame,
    fit_circle_direct,
    force_contrast,
    force_mean,
    force_variance,
    region_stats,
    track_video,
    update_circle,
)
from .phantom import (
    PhantomSpec,
    PhantomTruth,
    load_phantom_spec,
    parse_phantom_spec,
    render_phantom,
    truth_diameter,
)
from .filters import FilterSpec, apply_filter
from .evaluation import (
    MetricReport,
    ProfilePoint,
    alpha_sweep,
    compute_metrics,
    functional_profile,
    intensity_histogram,
)

__version__ = "0.1.0"

__all__ = [
    "ANNULUS",
    "CONTRAST",
    "FULL_COMPLEMENT",
    "MEAN",
    "VARIANCE",
    "Circle",
    "DegenerateRegionError",
    "EngineConfig",
    "FilterSpec",
    "ForceSet",
    "Frame",
    "FrameResult",
    "MetricReport",
    "ParameterError",
    "PhantomSpec",
    "PhantomTruth",
    "ProfilePoint",
    "RegionPolicy",
    "RegionStats",
    "SampledContour",
    "TrackResult",
    "alpha_sweep",
    "apply_filter",
    "bilinear_intensity",
    "compute_forces",
    "compute_metrics",
    "converge_frame",
    "fit_circle_direct",
    "force_contrast",
    "force_mean",
    "force_variance",
    "functional_profile",
    "intensity_histogram",
    "load_phantom_spec",
    "parse_phantom_spec",
    "region_stats",
    "render_phantom",
    "sample_circle",
    "track_video",
    "truth_diameter",
    "update_circle",
]
