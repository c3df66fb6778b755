import numpy as np
import numpy.testing as npt
import pytest

from labelvar.corruptions import (
    CORRUPTIONS,
    brightness,
    contrast,
    corrupt_dataset,
    defocus_blur,
    gaussian_noise,
    pixelate,
    shot_noise,
)
from labelvar.corruptions import _disk_kernel
from labelvar.errors import InvalidConfigError, InvalidInputError


def random_image(seed, shape=(12, 14, 3)):
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=shape)


ALL_TRANSFORMS = sorted(CORRUPTIONS)


@pytest.mark.parametrize("name", ALL_TRANSFORMS)
def test_severity_zero_is_identity(name):
    img = random_image(0)
    npt.assert_array_equal(CORRUPTIONS[name](img, 0, seed=5), img)


@pytest.mark.parametrize("name", ALL_TRANSFORMS)
@pytest.mark.parametrize("severity", [1, 2, 3, 4])
def test_output_stays_in_unit_range(name, severity):
    img = random_image(severity)
    out = CORRUPTIONS[name](img, severity, seed=9)
    assert out.shape == img.shape
    assert out.min() >= 0.0 and out.max() <= 1.0


@pytest.mark.parametrize("name", ALL_TRANSFORMS)
def test_severity_out_of_range_rejected(name):
    with pytest.raises(InvalidConfigError):
        CORRUPTIONS[name](random_image(1), 5)


class TestBrightness:
    def test_white_image_saturates(self):
        img = np.ones((4, 4, 1))
        for severity in range(5):
            npt.assert_array_equal(brightness(img, severity), img)

    def test_midgray_shift(self):
        img = np.full((2, 2, 1), 0.5)
        npt.assert_allclose(brightness(img, 2), 0.7, atol=1e-12)


class TestContrast:
    def test_constant_image_is_fixed_point(self):
        img = np.full((3, 5, 2), 0.42)
        for severity in range(5):
            npt.assert_allclose(contrast(img, severity), img, atol=1e-12)

    def test_stretch_then_clip(self):
        # channel mean 0.5, pixel 0.8, factor 2 -> 1.1, clipped to 1
        img = np.array([[[0.2], [0.8]]])
        out = contrast(img, 4)
        assert out[0, 1, 0] == 1.0
        npt.assert_allclose(out[0, 0, 0], 0.0, atol=1e-12)


class TestNoise:
    def test_gaussian_deterministic_given_seed(self):
        img = random_image(3)
        npt.assert_array_equal(gaussian_noise(img, 2, seed=7), gaussian_noise(img, 2, seed=7))
        assert not np.array_equal(gaussian_noise(img, 2, seed=7), gaussian_noise(img, 2, seed=8))

    def test_gaussian_empirical_sigma(self):
        img = np.full((200, 200, 1), 0.5)
        out = gaussian_noise(img, 2, seed=11)
        measured = (out - img).std()
        assert abs(measured - 0.08) <= 0.05 * 0.08

    def test_shot_deterministic_given_seed(self):
        img = random_image(4)
        npt.assert_array_equal(shot_noise(img, 3, seed=5), shot_noise(img, 3, seed=5))

    def test_shot_noise_scales_with_severity(self):
        img = np.full((120, 120, 1), 0.5)
        spreads = [(shot_noise(img, s, seed=6) - img).std() for s in (1, 4)]
        assert spreads[1] > spreads[0]


class TestPixelate:
    def test_checkerboard_blocks_average_to_half(self):
        img = np.indices((4, 4)).sum(axis=0) % 2
        img = img[:, :, None].astype(float)
        out = pixelate(img, 1)  # factor 2
        npt.assert_allclose(out, 0.5, atol=1e-12)

    def test_constant_image_unchanged(self):
        img = np.full((9, 7, 3), 0.31)  # sizes not divisible by the factor
        for severity in range(5):
            npt.assert_allclose(pixelate(img, severity), img, atol=1e-12)

    def test_blocks_are_constant(self):
        img = random_image(5, shape=(8, 8, 1))
        out = pixelate(img, 1)
        for i in range(0, 8, 2):
            for j in range(0, 8, 2):
                block = out[i : i + 2, j : j + 2, 0]
                assert np.all(block == block[0, 0])


class TestDefocusBlur:
    def test_kernel_normalized(self):
        for r in (1, 2, 3, 4):
            assert abs(_disk_kernel(r).sum() - 1.0) <= 1e-9

    def test_constant_image_unchanged(self):
        img = np.full((10, 11, 2), 0.66)
        for severity in range(5):
            npt.assert_allclose(defocus_blur(img, severity), img, atol=1e-9)

    def test_blur_reduces_variance(self):
        img = random_image(6)
        assert defocus_blur(img, 3).var() < img.var()

    def test_preserves_global_mean_closely(self):
        img = random_image(7, shape=(30, 30, 1))
        out = defocus_blur(img, 2)
        assert abs(out.mean() - img.mean()) <= 0.01


class TestCorruptDataset:
    def test_feature_rows_treated_as_flat_images(self):
        X = np.random.default_rng(8).uniform(0, 1, size=(20, 6))
        out = corrupt_dataset(X, "brightness", 2, seed=1)
        npt.assert_allclose(out, np.clip(X + 0.2, 0, 1), atol=1e-12)

    def test_deterministic_and_per_sample_seeded(self):
        X = np.random.default_rng(9).uniform(0, 1, size=(10, 6))
        a = corrupt_dataset(X, "gaussian_noise", 2, seed=3)
        b = corrupt_dataset(X, "gaussian_noise", 2, seed=3)
        npt.assert_array_equal(a, b)
        # sample i's noise does not depend on the rest of the batch
        sub = corrupt_dataset(X[:4], "gaussian_noise", 2, seed=3)
        npt.assert_array_equal(a[:4], sub)

    def test_image_stack_supported(self):
        imgs = np.random.default_rng(10).uniform(0, 1, size=(5, 6, 6, 3))
        out = corrupt_dataset(imgs, "pixelate", 2, seed=4)
        assert out.shape == imgs.shape

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidConfigError):
            corrupt_dataset(np.zeros((2, 3)), "vignette", 1)

    def test_bad_shape_rejected(self):
        with pytest.raises(InvalidInputError):
            corrupt_dataset(np.zeros(5), "brightness", 1)
