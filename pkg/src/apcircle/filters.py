"""Speckle pre-filtering: median, bilateral and adaptive Wiener smoothing.

All filters use mirror padding at the borders, keep output inside [0, 1]
and preserve frame dimensions and pixel spacing.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.ndimage import median_filter, uniform_filter

from .model import Frame, ParameterError

NONE = "none"
MEDIAN = "median"
BILATERAL = "bilateral"
WIENER = "wiener"
FILTER_KINDS = (NONE, MEDIAN, BILATERAL, WIENER)

AUTO = "auto"


@dataclass(frozen=True)
class FilterSpec:
    """Which filter to apply and its parameters.

    ``wiener_noise_var`` is either a variance (intensity squared) or
    ``"auto"``, which estimates it as the mean of the local window
    variances.
    """

    kind: str = NONE
    window: int = 5
    bilateral_sigma_space: float = 2.0
    bilateral_sigma_range: float = 0.1
    wiener_noise_var: Union[float, str] = AUTO

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ParameterError(f"unknown filter kind: {self.kind!r}")
        if self.window < 3 or self.window % 2 == 0:
            raise ParameterError("window must be odd and >= 3")
        if not (self.bilateral_sigma_space > 0 and self.bilateral_sigma_range > 0):
            raise ParameterError("bilateral sigmas must be positive")
        if self.wiener_noise_var != AUTO and not (float(self.wiener_noise_var) >= 0):
            raise ParameterError("wiener_noise_var must be 'auto' or >= 0")


def _bilateral(img: np.ndarray, spec: FilterSpec) -> np.ndarray:
    rad = spec.window // 2
    padded = np.pad(img, rad, mode="symmetric")
    h, w = img.shape
    acc = np.zeros_like(img)
    weight_sum = np.zeros_like(img)
    two_ss = 2.0 * spec.bilateral_sigma_space**2
    two_sr = 2.0 * spec.bilateral_sigma_range**2
    for di in range(-rad, rad + 1):
        for dj in range(-rad, rad + 1):
            shifted = padded[rad + di : rad + di + h, rad + dj : rad + dj + w]
            weights = np.exp(-(di * di + dj * dj) / two_ss) * np.exp(
                -((shifted - img) ** 2) / two_sr
            )
            acc += weights * shifted
            weight_sum += weights
    return acc / weight_sum


def _wiener(img: np.ndarray, spec: FilterSpec) -> np.ndarray:
    local_mean = uniform_filter(img, spec.window, mode="reflect")
    local_sq = uniform_filter(img * img, spec.window, mode="reflect")
    local_var = np.clip(local_sq - local_mean * local_mean, 0.0, None)
    if spec.wiener_noise_var == AUTO:
        noise = float(local_var.mean())
    else:
        noise = float(spec.wiener_noise_var)
    # shrink toward the local mean where the local variance is noise-level
    excess = np.clip(local_var - noise, 0.0, None)
    denom = np.maximum(local_var, np.finfo(np.float64).tiny)
    return local_mean + (excess / denom) * (img - local_mean)


def apply_filter(frame: Frame, spec: FilterSpec) -> Frame:
    """Apply the configured speckle filter to one frame."""
    if spec.kind == NONE:
        return frame
    img = frame.intensities
    if spec.kind == MEDIAN:
        out = median_filter(img, size=spec.window, mode="reflect")
    elif spec.kind == BILATERAL:
        out = _bilateral(img, spec)
    else:
        out = _wiener(img, spec)
    return Frame(np.clip(out, 0.0, 1.0), pixel_spacing_cm=frame.pixel_spacing_cm)
