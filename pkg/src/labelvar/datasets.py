"""Synthetic labeled datasets at desk scale.

All generators emit features inside the unit box so the image-style
corruption transforms (which clip to [0, 1]) apply directly.  Classes are
balanced within one sample and everything is deterministic given the seed.
"""

import numpy as np

from .errors import InvalidConfigError
from .seeding import spawn_rng

__all__ = ["DATASET_KINDS", "synth_dataset"]

DATASET_KINDS = ("blobs", "two-moons", "rings")


def _class_counts(n_samples: int, classes: int) -> np.ndarray:
    counts = np.full(classes, n_samples // classes, dtype=np.int64)
    counts[: n_samples % classes] += 1
    return counts


def _blob_centers(classes, n_features, rng):
    # maximin draw: several candidate center sets, keep the most spread out
    best = None
    best_sep = -1.0
    for _ in range(32):
        cand = rng.uniform(0.25, 0.75, size=(classes, n_features))
        diff = cand[:, None, :] - cand[None, :, :]
        dist = np.sqrt((diff**2).sum(-1))
        sep = dist[np.triu_indices(classes, k=1)].min()
        if sep > best_sep:
            best_sep = sep
            best = cand
    return best


def _blobs(classes, n_samples, noise, rng, n_features):
    centers = _blob_centers(classes, n_features, rng)
    counts = _class_counts(n_samples, classes)
    X = np.vstack(
        [centers[c] + rng.normal(0.0, noise, size=(counts[c], n_features)) for c in range(classes)]
    )
    y = np.repeat(np.arange(classes), counts)
    return X, y


def _two_moons(classes, n_samples, noise, rng):
    if classes != 2:
        raise InvalidConfigError(f"two-moons is a 2-class dataset, got classes={classes}")
    counts = _class_counts(n_samples, 2)
    t0 = rng.uniform(0.0, np.pi, size=counts[0])
    t1 = rng.uniform(0.0, np.pi, size=counts[1])
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([upper, lower]) + rng.normal(0.0, noise, size=(n_samples, 2))
    y = np.repeat(np.arange(2), counts)
    # map the [-1, 2] x [-1.5, 1] band into the unit box
    X = (X - np.array([-1.0, -1.5])) / np.array([3.0, 2.5])
    return X, y


def _rings(classes, n_samples, noise, rng):
    counts = _class_counts(n_samples, classes)
    parts = []
    for c in range(classes):
        radius = (c + 1) / (classes + 1)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=counts[c])
        ring = 0.5 + radius * 0.5 * np.column_stack([np.cos(theta), np.sin(theta)])
        parts.append(ring + rng.normal(0.0, noise, size=(counts[c], 2)))
    X = np.vstack(parts)
    y = np.repeat(np.arange(classes), counts)
    return X, y


def synth_dataset(kind: str, classes: int, n_samples: int, noise: float, seed: int, n_features: int = 8):
    """Generate a labeled dataset; returns ``(features, labels)``.

    ``n_features`` only applies to ``blobs``; the other kinds are planar.
    Features are clipped into [0, 1] so the corruption transforms compose.
    """
    if kind not in DATASET_KINDS:
        raise InvalidConfigError(f"unknown dataset kind {kind!r}; choose from {DATASET_KINDS}")
    if classes < 2:
        raise InvalidConfigError(f"need at least 2 classes, got {classes}")
    if n_samples < classes:
        raise InvalidConfigError(f"need at least one sample per class, got n_samples={n_samples}")
    if noise < 0:
        raise InvalidConfigError(f"noise must be nonnegative, got {noise}")
    rng = spawn_rng(seed)
    if kind == "blobs":
        X, y = _blobs(classes, n_samples, noise, rng, n_features)
    elif kind == "two-moons":
        X, y = _two_moons(classes, n_samples, noise, rng)
    else:
        X, y = _rings(classes, n_samples, noise, rng)
    X = np.clip(X, 0.0, 1.0)
    # shuffle so class blocks do not align with later splits
    order = rng.permutation(n_samples)
    return X[order], y[order]
