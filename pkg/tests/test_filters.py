import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from apcircle import FilterSpec, Frame, ParameterError, PhantomSpec, apply_filter, render_phantom

KINDS = ("median", "bilateral", "wiener")


@pytest.fixture(scope="module")
def speckled_frame():
    frames, _ = render_phantom(PhantomSpec(frame_count=1))
    return frames[0]


class TestFilterSpec:
    def test_rejects_even_window(self):
        with pytest.raises(ParameterError):
            FilterSpec(kind="median", window=4)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ParameterError):
            FilterSpec(kind="box")

    def test_rejects_bad_sigmas(self):
        with pytest.raises(ParameterError):
            FilterSpec(kind="bilateral", bilateral_sigma_space=0.0)


class TestApplyFilter:
    def test_none_is_identity(self, speckled_frame):
        assert apply_filter(speckled_frame, FilterSpec(kind="none")) is speckled_frame

    @pytest.mark.parametrize("kind", KINDS)
    def test_constant_frame_unchanged(self, kind):
        frame = Frame(np.full((32, 32), 0.37))
        out = apply_filter(frame, FilterSpec(kind=kind))
        np.testing.assert_allclose(out.intensities, 0.37, atol=1e-12)

    def test_median_removes_impulse(self):
        img = np.zeros((24, 24))
        img[8, 8] = 1.0
        out = apply_filter(Frame(img), FilterSpec(kind="median", window=3))
        assert (out.intensities == 0.0).all()

    @pytest.mark.parametrize("kind", KINDS)
    def test_preserves_range_and_shape(self, speckled_frame, kind):
        out = apply_filter(speckled_frame, FilterSpec(kind=kind))
        assert out.intensities.shape == speckled_frame.intensities.shape
        assert out.intensities.min() >= 0.0
        assert out.intensities.max() <= 1.0
        assert out.pixel_spacing_cm == speckled_frame.pixel_spacing_cm

    def test_bilateral_degenerates_to_gaussian(self, speckled_frame):
        spec = FilterSpec(kind="bilateral", window=5, bilateral_sigma_space=2.0,
                          bilateral_sigma_range=1e9)
        out = apply_filter(speckled_frame, spec)
        # spatial Gaussian truncated to the same 5x5 window
        reference = gaussian_filter(
            speckled_frame.intensities, 2.0, truncate=(5 // 2) / 2.0, mode="reflect"
        )
        assert np.abs(out.intensities - reference).max() < 1e-3

    def test_wiener_flattens_noise_toward_local_mean(self, speckled_frame):
        out = apply_filter(speckled_frame, FilterSpec(kind="wiener"))
        assert out.intensities.var() < speckled_frame.intensities.var()

    def test_wiener_explicit_noise_variance(self, speckled_frame):
        auto = apply_filter(speckled_frame, FilterSpec(kind="wiener"))
        strong = apply_filter(speckled_frame, FilterSpec(kind="wiener", wiener_noise_var=0.5))
        assert (auto.intensities != strong.intensities).any()
        # enormous assumed noise returns essentially the local mean everywhere
        assert strong.intensities.var() < auto.intensities.var()
