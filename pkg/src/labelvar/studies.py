"""Replications of the two observations motivating the estimator.

Study 1: two same-distribution halves of a labeled set show similar
per-area accuracy, area by area.

Study 2: across increasingly corrupted variants of a set, the fraction of
top-confidence samples (top LVR area) tracks the true accuracy linearly;
the study reports the points, a least-squares line, and the correlation.
"""

from dataclasses import dataclass

import numpy as np

from .corruptions import corrupt_dataset
from .estimator import EstimationConfig
from .lvr import LabelMatrix, area_accuracy, compute_lvr, dominant_stats, partition_areas
from .mlp import MlpModel, evaluate_accuracy, mc_predict
from .seeding import derive_seed, spawn_rng

__all__ = [
    "AreaAgreementRow",
    "ConfidencePoint",
    "ConfidenceStudy",
    "split_halves",
    "area_agreement",
    "area_agreement_study",
    "top_area_fraction",
    "confidence_accuracy_study",
]


@dataclass(frozen=True)
class AreaAgreementRow:
    index: int
    lvr_low: float
    lvr_high: float
    ref_size: int
    new_size: int
    ref_accuracy: float
    new_accuracy: float


@dataclass(frozen=True)
class ConfidencePoint:
    severity: int
    top_fraction: float
    accuracy: float


@dataclass(frozen=True)
class ConfidenceStudy:
    points: tuple
    slope: float
    intercept: float
    pearson_r: float


def split_halves(features, labels, seed: int):
    """Random even split into ``(ref_X, ref_y, new_X, new_y)``."""
    features = np.asarray(features)
    labels = np.asarray(labels)
    n = features.shape[0]
    order = spawn_rng(seed).permutation(n)
    half = n // 2
    a, b = order[:half], order[half:]
    return features[a], labels[a], features[b], labels[b]


def _per_area_accuracy(matrix: LabelMatrix, labels, num_areas: int):
    dom, _ = dominant_stats(matrix)
    part = partition_areas(compute_lvr(matrix), num_areas)
    return area_accuracy(part, labels, dom)


def area_agreement(ref: LabelMatrix, ref_labels, new: LabelMatrix, new_labels, num_areas: int):
    """Per-area accuracy of two labeled sets, for side-by-side comparison."""
    ref_aa = _per_area_accuracy(ref, ref_labels, num_areas)
    new_aa = _per_area_accuracy(new, new_labels, num_areas)
    rows = []
    for t in range(num_areas):
        rows.append(
            AreaAgreementRow(
                index=t,
                lvr_low=t / num_areas,
                lvr_high=(t + 1) / num_areas,
                ref_size=int(ref_aa.sizes[t]),
                new_size=int(new_aa.sizes[t]),
                ref_accuracy=float(ref_aa.values[t]),
                new_accuracy=float(new_aa.values[t]),
            )
        )
    return rows


def area_agreement_study(
    model: MlpModel,
    features,
    labels,
    *,
    num_areas: int = 50,
    num_passes: int | None = None,
    master_seed: int = 0,
):
    """Split a labeled set in half and compare per-area accuracies.

    Returns ``(rows, (ref_matrix, ref_y, new_matrix, new_y))`` so callers
    can reuse the predictions.
    """
    cfg = EstimationConfig(num_areas=num_areas, num_passes=num_passes)
    t = cfg.effective_num_passes
    ref_X, ref_y, new_X, new_y = split_halves(features, labels, derive_seed(master_seed, 0))
    ref_m = mc_predict(model, ref_X, t, derive_seed(master_seed, 1))
    new_m = mc_predict(model, new_X, t, derive_seed(master_seed, 2))
    rows = area_agreement(ref_m, ref_y, new_m, new_y, num_areas)
    return rows, (ref_m, ref_y, new_m, new_y)


def top_area_fraction(matrix: LabelMatrix, num_areas: int) -> float:
    """Fraction of samples in the top LVR area (the most confident ones)."""
    part = partition_areas(compute_lvr(matrix), num_areas)
    return float(part.area_sizes[num_areas - 1] / matrix.num_samples)


def confidence_accuracy_study(
    model: MlpModel,
    features,
    labels,
    *,
    corruption: str = "gaussian_noise",
    severities=(0, 1, 2, 3, 4),
    num_areas: int = 50,
    num_passes: int | None = None,
    master_seed: int = 0,
) -> ConfidenceStudy:
    """Relate top-area fraction to true accuracy across a severity ladder.

    Fits accuracy as a linear least-squares function of the top-area
    fraction (degree-1 polynomial fit) and reports Pearson correlation.
    """
    cfg = EstimationConfig(num_areas=num_areas, num_passes=num_passes)
    t = cfg.effective_num_passes
    points = []
    for s_idx, severity in enumerate(severities):
        shifted = corrupt_dataset(features, corruption, severity, derive_seed(master_seed, 0, s_idx))
        matrix = mc_predict(model, shifted, t, derive_seed(master_seed, 1, s_idx))
        points.append(
            ConfidencePoint(
                severity=int(severity),
                top_fraction=top_area_fraction(matrix, num_areas),
                accuracy=evaluate_accuracy(model, shifted, labels),
            )
        )
    fractions = np.array([p.top_fraction for p in points])
    accuracies = np.array([p.accuracy for p in points])
    slope, intercept = np.polyfit(fractions, accuracies, deg=1)
    r = float(np.corrcoef(fractions, accuracies)[0, 1])
    return ConfidenceStudy(
        points=tuple(points), slope=float(slope), intercept=float(intercept), pearson_r=r
    )
