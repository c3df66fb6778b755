"""Parametric image corruptions for manufacturing distribution shift.

Six transforms, each with severity levels 0..4 where severity 0 is always
the identity.  Images are float arrays of shape (H, W, C) with pixels in
[0, 1]; every transform clips its output back into that range.

The severity parameter tables are chosen to give a monotone accuracy
degradation ladder on the toy classifier; feature-vector datasets are
corrupted by viewing each row as a 1 x D single-channel image.
"""

import numpy as np
from scipy import ndimage

from .errors import InvalidConfigError, InvalidInputError
from .seeding import derive_seed, spawn_rng

__all__ = [
    "CORRUPTIONS",
    "SEVERITY_LEVELS",
    "brightness",
    "contrast",
    "gaussian_noise",
    "shot_noise",
    "pixelate",
    "defocus_blur",
    "corrupt_dataset",
]

SEVERITY_LEVELS = range(5)

BRIGHTNESS_OFFSETS = (0.0, 0.1, 0.2, 0.3, 0.4)
CONTRAST_FACTORS = (1.0, 1.25, 1.5, 1.75, 2.0)
GAUSSIAN_SIGMAS = (0.0, 0.04, 0.08, 0.12, 0.16)
SHOT_LAMBDAS = (None, 60.0, 25.0, 12.0, 5.0)  # None: identity
PIXELATE_FACTORS = (1, 2, 3, 4, 6)
DEFOCUS_RADII = (0, 1, 2, 3, 4)


def _check_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3:
        raise InvalidInputError(f"expected an H x W x C image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InvalidInputError("image contains non-finite pixels")
    return img


def _check_severity(severity: int) -> int:
    severity = int(severity)
    if severity not in SEVERITY_LEVELS:
        raise InvalidConfigError(f"severity must lie in 0..4, got {severity}")
    return severity


def brightness(img, severity: int, seed: int = 0) -> np.ndarray:
    """Add a constant offset; deterministic, the seed is unused."""
    img = _check_image(img)
    severity = _check_severity(severity)
    if severity == 0:
        return img.copy()
    return np.clip(img + BRIGHTNESS_OFFSETS[severity], 0.0, 1.0)


def contrast(img, severity: int, seed: int = 0) -> np.ndarray:
    """Stretch pixels away from the per-channel mean."""
    img = _check_image(img)
    severity = _check_severity(severity)
    if severity == 0:
        return img.copy()
    c = CONTRAST_FACTORS[severity]
    mean = img.mean(axis=(0, 1), keepdims=True)
    return np.clip((img - mean) * c + mean, 0.0, 1.0)


def gaussian_noise(img, severity: int, seed: int = 0) -> np.ndarray:
    """Add seeded zero-mean Gaussian noise per pixel."""
    img = _check_image(img)
    severity = _check_severity(severity)
    if severity == 0:
        return img.copy()
    rng = spawn_rng(seed)
    noise = rng.normal(0.0, GAUSSIAN_SIGMAS[severity], size=img.shape)
    return np.clip(img + noise, 0.0, 1.0)


def shot_noise(img, severity: int, seed: int = 0) -> np.ndarray:
    """Poisson (photon-count) noise: draw Poisson(pixel * lam) / lam."""
    img = _check_image(img)
    severity = _check_severity(severity)
    if severity == 0:
        return img.copy()
    lam = SHOT_LAMBDAS[severity]
    rng = spawn_rng(seed)
    return np.clip(rng.poisson(np.clip(img, 0.0, 1.0) * lam) / lam, 0.0, 1.0)


def _block_reduce_axis(arr: np.ndarray, factor: int, axis: int) -> np.ndarray:
    """Mean over consecutive blocks along one axis; the last block may be short."""
    n = arr.shape[axis]
    starts = np.arange(0, n, factor)
    sums = np.add.reduceat(arr, starts, axis=axis)
    counts = np.minimum(starts + factor, n) - starts
    shape = [1] * arr.ndim
    shape[axis] = len(starts)
    return sums / counts.reshape(shape)


def pixelate(img, severity: int, seed: int = 0) -> np.ndarray:
    """Block-average downscale then nearest-neighbor upscale."""
    img = _check_image(img)
    severity = _check_severity(severity)
    f = PIXELATE_FACTORS[severity]
    if f == 1:
        return img.copy()
    small = _block_reduce_axis(_block_reduce_axis(img, f, axis=0), f, axis=1)
    rows = np.minimum(np.arange(img.shape[0]) // f, small.shape[0] - 1)
    cols = np.minimum(np.arange(img.shape[1]) // f, small.shape[1] - 1)
    return np.clip(small[np.ix_(rows, cols)], 0.0, 1.0)


def _disk_kernel(radius: int) -> np.ndarray:
    grid = np.arange(-radius, radius + 1)
    yy, xx = np.meshgrid(grid, grid, indexing="ij")
    kernel = (yy**2 + xx**2 <= radius**2).astype(np.float64)
    return kernel / kernel.sum()

def defocus_blur(img, severity: int, seed: int = 0) -> np.ndarray:
    """Convolve each channel with a normalized disk, edge-replicated borders."""
    img = _check_image(img)
    severity = _check_severity(severity)
    r = DEFOCUS_RADII[severity]
    if r == 0:
        return img.copy()
    kernel = _disk_kernel(r)
    out = np.empty_like(img)
    for ch in range(img.shape[2]):
        out[:, :, ch] = ndimage.convolve(img[:, :, ch], kernel, mode="nearest")
    return np.clip(out, 0.0, 1.0)


CORRUPTIONS = {
    "brightness": brightness,
    "contrast": contrast,
    "gaussian_noise": gaussian_noise,
    "shot_noise": shot_noise,
    "pixelate": pixelate,
    "defocus_blur": defocus_blur,
}


def corrupt_dataset(features, kind: str, severity: int, seed: int = 0) -> np.ndarray:
    """Apply a corruption to every sample of a dataset.

    ``features`` is either an (N, D) matrix, where each row is treated as a
    1 x D single-channel image, or an (N, H, W, C) image stack.  Each sample
    gets its own derived noise stream, so the result is independent of
    sample order and batching.
    """
    if kind not in CORRUPTIONS:
        raise InvalidConfigError(f"unknown corruption {kind!r}; choose from {sorted(CORRUPTIONS)}")
    fn = CORRUPTIONS[kind]
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 2:
        out = np.empty_like(features)
        for i, row in enumerate(features):
            out[i] = fn(row.reshape(1, -1, 1), severity, derive_seed(seed, i)).reshape(-1)
        return out
    if features.ndim == 4:
        return np.stack(
            [fn(img, severity, derive_seed(seed, i)) for i, img in enumerate(features)]
        )
    raise InvalidInputError(
        f"expected (N, D) features or (N, H, W, C) images, got shape {features.shape}"
    )
