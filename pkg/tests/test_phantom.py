import numpy as np
import pytest
from scipy import stats as scistats

from apcircle import (
    Circle,
    ParameterError,
    PhantomSpec,
    RegionPolicy,
    parse_phantom_spec,
    region_stats,
    render_phantom,
    truth_diameter,
)
from apcircle.phantom import render_frame


class TestSpecValidation:
    def test_requires_darker_interior(self):
        with pytest.raises(ParameterError):
            PhantomSpec(mean_in=0.5, mean_out=0.4)

    def test_requires_positive_wave_floor(self):
        with pytest.raises(ParameterError):
            PhantomSpec(base_diameter=10, amplitude=8)

    def test_requires_frames(self):
        with pytest.raises(ParameterError):
            PhantomSpec(frame_count=0)

    def test_gap_shape_checked(self):
        with pytest.raises(ParameterError):
            PhantomSpec(gaps=((0, 30),))


class TestRendering:
    def test_noiseless_two_level_statistics(self):
        spec = PhantomSpec(
            frame_count=1, base_diameter=40, amplitude=0, blur_sigma=0, speckle=False
        )
        frames, truth = render_phantom(spec)
        circle = Circle(truth.centers[0, 0], truth.centers[0, 1], truth.ap_diameters[0] / 2)
        stats = region_stats(frames[0], circle, RegionPolicy())
        assert stats.mean_inside == pytest.approx(spec.mean_in, abs=1e-12)
        assert stats.mean_outside == pytest.approx(spec.mean_out, abs=1e-12)
        assert stats.var_inside == pytest.approx(0.0, abs=1e-12)

    def test_determinism_bit_identical(self):
        spec = PhantomSpec(frame_count=3)
        first, _ = render_phantom(spec)
        second, _ = render_phantom(spec)
        for a, b in zip(first, second):
            assert (a.intensities == b.intensities).all()

    def test_frames_differ_between_indices(self):
        frames, _ = render_phantom(PhantomSpec(frame_count=2, amplitude=0))
        assert (frames[0].intensities != frames[1].intensities).any()

    def test_speckle_interior_statistics(self):
        # large vessel so the interior patch holds >= 1e4 pixels
        spec = PhantomSpec(
            frame_count=1, base_diameter=150, amplitude=0, blur_sigma=0, speckle=True
        )
        frames, _ = render_phantom(spec)
        ys, xs = np.mgrid[0:192, 0:192]
        patch = frames[0].intensities[(xs - 96) ** 2 + (ys - 96) ** 2 <= 60 ** 2]
        assert patch.size >= 10_000
        assert abs(patch.mean() - spec.mean_in) / spec.mean_in < 0.02
        assert scistats.skew(patch) > 0.3  # right-skewed multiplicative noise

    def test_energy_preserved_by_unit_mean_speckle(self):
        noisy = render_frame(PhantomSpec(frame_count=1), 0)
        clean = render_frame(PhantomSpec(frame_count=1, speckle=False), 0)
        assert abs(noisy.mean() - clean.mean()) / clean.mean() < 0.02

    def test_interior_darker_than_exterior_every_frame(self):
        frames, truth = render_phantom(PhantomSpec(frame_count=10))
        ys, xs = np.mgrid[0:192, 0:192]
        for frame, d in zip(frames, truth.ap_diameters):
            r = d / 2
            rho2 = (xs - 96) ** 2 + (ys - 96) ** 2
            inner = frame.intensities[rho2 <= (0.6 * r) ** 2]
            outer = frame.intensities[rho2 >= (1.6 * r) ** 2]
            assert inner.mean() < outer.mean()

    def test_gap_suppresses_wall_contrast(self):
        base = PhantomSpec(frame_count=1, amplitude=0, blur_sigma=0, speckle=False)
        gapped = PhantomSpec(
            frame_count=1,
            amplitude=0,
            blur_sigma=0,
            speckle=False,
            gaps=((-40.0, 40.0, 0.4),),
        )
        plain = render_frame(base, 0)
        with_gap = render_frame(gapped, 0)
        # just inside the right wall: the gap ramp brightens the interior edge
        y, x = 96, 96 + 27
        assert plain[y, x] == base.mean_in
        assert base.mean_in < with_gap[y, x] < base.mean_out
        # wall at an un-gapped angle is untouched
        assert with_gap[96 + 27, 96] == base.mean_in

    def test_aspect_ratio_widens_laterally(self):
        spec = PhantomSpec(
            frame_count=1, amplitude=0, blur_sigma=0, speckle=False, aspect_ratio=1.5
        )
        img = render_frame(spec, 0)
        # at lateral offset 40 px (inside 45-px lateral semi-axis) still dark
        assert img[96, 96 + 40] == spec.mean_in
        # at vertical offset 40 px (outside 30-px AP semi-axis) bright
        assert img[96 + 40, 96] == spec.mean_out


class TestTruth:
    def test_truth_diameter_wave(self):
        spec = PhantomSpec(frame_count=120, period=100.0, base_diameter=60, amplitude=15)
        _, truth = render_phantom(spec)
        assert truth_diameter(truth, 0) == pytest.approx(60.0)
        assert truth_diameter(truth, 25) == pytest.approx(75.0)
        for t in (0, 7, 50, 119):
            expected = 60 + 15 * np.sin(2 * np.pi * t / 100.0)
            assert truth_diameter(truth, t) == pytest.approx(expected, abs=1e-12)

    def test_truth_index_range(self):
        _, truth = render_phantom(PhantomSpec(frame_count=2))
        with pytest.raises(ParameterError):
            truth_diameter(truth, 2)
        with pytest.raises(ParameterError):
            truth_diameter(truth, -1)


class TestSpecFile:
    def test_parse_full_document(self):
        text = """
        # tiny test phantom
        width = 64
        height = 64
        frame_count = 3
        center_x = 32
        center_y = 30
        base_diameter = 24
        amplitude = 4
        period = 50
        aspect_ratio = 1.25
        mean_in = 0.12
        mean_out = 0.5
        blur_sigma = 1.5
        speckle = off
        rng_seed = 99
        gap = 150:210:0.3
        gap = 330:30
        """
        spec = parse_phantom_spec(text)
        assert spec.width == 64 and spec.frame_count == 3
        assert spec.center_y == 30.0
        assert spec.aspect_ratio == 1.25
        assert spec.speckle is False
        assert spec.rng_seed == 99
        assert spec.gaps == ((150.0, 210.0, 0.3), (330.0, 30.0, 0.35))

    def test_unknown_key_rejected(self):
        with pytest.raises(ParameterError):
            parse_phantom_spec("wobble = 3")

    def test_bad_boolean_rejected(self):
        with pytest.raises(ValueError):
            parse_phantom_spec("speckle = maybe")

    def test_rendered_from_parsed_spec(self):
        spec = parse_phantom_spec("frame_count = 2\nwidth = 96\nheight = 96\ncenter_x = 48\ncenter_y = 48\nbase_diameter = 30\namplitude = 5")
        frames, truth = render_phantom(spec)
        assert len(frames) == 2
        assert frames[0].width == 96
        assert truth.ap_diameters[0] == pytest.approx(30.0)
