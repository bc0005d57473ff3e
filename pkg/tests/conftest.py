import numpy as np
import pytest

from apcircle import Circle, EngineConfig, Frame, PhantomSpec, converge_frame, render_phantom
from apcircle.phantom import STANDARD_PHANTOM


@pytest.fixture(scope="session")
def disk_frame():
    """64x64 two-level frame: 0.1 inside radius 20 about (32, 32), 0.9 outside."""
    ys, xs = np.mgrid[0:64, 0:64]
    img = np.where((xs - 32) ** 2 + (ys - 32) ** 2 <= 20 ** 2, 0.1, 0.9)
    return Frame(img, pixel_spacing_cm=0.05)


@pytest.fixture(scope="session")
def uniform_frame():
    return Frame(np.full((64, 64), 0.5), pixel_spacing_cm=0.05)


@pytest.fixture(scope="session")
def standard_video():
    """The standard speckled phantom: 450 frames, D(t) = 60 + 15 sin(2 pi t/150)."""
    frames, truth = render_phantom(STANDARD_PHANTOM)
    return frames, truth


@pytest.fixture(scope="session")
def short_video():
    """A 20-frame cut of the standard phantom for cheaper tests."""
    frames, truth = render_phantom(PhantomSpec(frame_count=20))
    return frames, truth


@pytest.fixture(scope="session")
def warm_engine(uniform_frame):
    """Force numba compilation before any timed test."""
    converge_frame(uniform_frame, Circle(32, 32, 6), EngineConfig(max_iterations=2))
