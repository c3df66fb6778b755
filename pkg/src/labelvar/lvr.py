"""Label variation ratios and area partitioning.

Given T stochastic predictions per sample (dropout passes or an ensemble of
model variants), the label variation ratio (LVR) of a sample is the fraction
of passes that agree with its dominant predicted label.  High LVR means the
model labels the sample consistently; low LVR marks samples the stochastic
passes disagree on, which is used as a proxy for proximity to the decision
boundary.

LVR values are exact rationals k/T with k the dominant-label count.  They
are stored as integer pairs and all interval logic below runs in integer
arithmetic, so samples sitting exactly on an area boundary are never
misassigned by floating-point rounding.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError

__all__ = [
    "LabelMatrix",
    "LvrVector",
    "AreaPartition",
    "AreaAccuracy",
    "dominant_label",
    "dominant_stats",
    "compute_lvr",
    "partition_areas",
    "area_accuracy",
]


@dataclass(frozen=True)
class LabelMatrix:
    """N x T matrix of predicted class labels from T stochastic passes.

    ``labels[i, k]`` is the label assigned to sample ``i`` on pass ``k``.
    Entries must lie in ``[0, num_classes)``.
    """

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2 or labels.shape[0] < 1 or labels.shape[1] < 1:
            raise InvalidInputError(
                f"label matrix must be N x T with N, T >= 1, got shape {labels.shape}"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            raise InvalidInputError(f"labels must be integers, got dtype {labels.dtype}")
        if self.num_classes < 2:
            raise InvalidInputError(f"num_classes must be >= 2, got {self.num_classes}")
        if labels.min() < 0 or labels.max() >= self.num_classes:
            raise InvalidInputError(
                f"labels must lie in [0, {self.num_classes}), "
                f"found range [{labels.min()}, {labels.max()}]"
            )
        object.__setattr__(self, "labels", labels)

    @property
    def num_samples(self) -> int:
        return self.labels.shape[0]

    @property
    def num_passes(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class LvrVector:
    """Per-sample label variation ratios, stored exactly.

    ``dominant_counts[i] / num_passes`` is the LVR of sample ``i``; the
    integer pair representation keeps area assignment exact.
    """

    dominant_counts: np.ndarray
    num_passes: int

    def __post_init__(self):
        counts = np.asarray(self.dominant_counts)
        if counts.min() < 1 or counts.max() > self.num_passes:
            raise InvalidInputError("dominant counts must lie in [1, num_passes]")
        object.__setattr__(self, "dominant_counts", counts)

    @property
    def values(self) -> np.ndarray:
        """LVR values as floats in (0, 1]."""
        return self.dominant_counts / self.num_passes


@dataclass(frozen=True)
class AreaPartition:
    """Assignment of samples to LVR areas.

    Area ``t`` of ``n`` holds the samples whose LVR lies in the half-open
    interval ``(t/n, (t+1)/n]``; the partition is total and disjoint.
    """

    num_areas: int
    assignment: np.ndarray
    area_sizes: np.ndarray


@dataclass(frozen=True)
class AreaAccuracy:
    """Per-area prediction accuracy on labeled data.

    ``correct[t] / sizes[t]`` is the accuracy of area ``t``; empty areas are
    flagged rather than given a made-up accuracy at this layer.
    """

    correct: np.ndarray
    sizes: np.ndarray

    @property
    def empty(self) -> np.ndarray:
        return self.sizes == 0

    @property
    def values(self) -> np.ndarray:
        """Accuracies as floats, NaN for empty areas."""
        with np.errstate(invalid="ignore"):
            return np.where(self.sizes > 0, self.correct / np.maximum(self.sizes, 1), np.nan)


def dominant_label(row, num_classes: int):
    """Return ``(label, count)`` of the most frequent label in ``row``.

    Ties break toward the smallest label index, so the result is
    deterministic regardless of the order of the passes.
    """
    row = np.asarray(row)
    if row.size == 0:
        raise InvalidInputError("cannot take the dominant label of an empty row")
    if row.min() < 0 or row.max() >= num_classes:
        raise InvalidInputError(f"labels must lie in [0, {num_classes})")
    counts = np.bincount(row, minlength=num_classes)
    label = int(np.argmax(counts))
    return label, int(counts[label])


def dominant_stats(matrix: LabelMatrix):
    """Dominant label and its count for every row of a label matrix.

    Returns ``(labels, counts)`` arrays of length N.  Ties break toward the
    smallest label index, as in :func:`dominant_label`.
    """
    onehot_counts = (matrix.labels[:, :, None] == np.arange(matrix.num_classes)).sum(axis=1)
    labels = np.argmax(onehot_counts, axis=1)
    counts = onehot_counts[np.arange(matrix.num_samples), labels]
    return labels, counts


def compute_lvr(matrix: LabelMatrix) -> LvrVector:
    """Label variation ratio of every sample in ``matrix``.

    LVR is the share of the T passes that predicted the dominant label, an
    exact rational in (0, 1]; samples the passes disagree on score low.
    """
    _, counts = dominant_stats(matrix)
    return LvrVector(dominant_counts=counts, num_passes=matrix.num_passes)


def partition_areas(lvr: LvrVector, num_areas: int) -> AreaPartition:
    """Assign each sample to the area containing its LVR.

    A sample with LVR ``k/T`` lands in area ``ceil(k*n/T) - 1``, which is
    the integer form of membership in ``(t/n, (t+1)/n]``.  Computed with
    integer arithmetic only; no floating-point interval tests.
    """
    if num_areas < 1:
        raise InvalidConfigError(f"number of areas must be >= 1, got {num_areas}")
    k = lvr.dominant_counts.astype(np.int64)
    t = -(-(k * num_areas) // lvr.num_passes) - 1
    sizes = np.bincount(t, minlength=num_areas)
    return AreaPartition(num_areas=num_areas, assignment=t, area_sizes=sizes)


def area_accuracy(partition: AreaPartition, true_labels, dominant_labels) -> AreaAccuracy:
    """Accuracy of the dominant-label prediction inside each area.

    Only meaningful on labeled data.  Counts are kept as integers so
    downstream consumers can do exact arithmetic with them.
    """
    true_labels = np.asarray(true_labels)
    dominant_labels = np.asarray(dominant_labels)
    n_samples = partition.assignment.shape[0]
    if true_labels.shape[0] != n_samples or dominant_labels.shape[0] != n_samples:
        raise InvalidInputError(
            f"length mismatch: partition has {n_samples} samples, "
            f"got {true_labels.shape[0]} true labels and {dominant_labels.shape[0]} predictions"
        )
    hits = (true_labels == dominant_labels).astype(np.int64)
    correct = np.bincount(partition.assignment, weights=hits, minlength=partition.num_areas)
    return AreaAccuracy(correct=correct.astype(np.int64), sizes=partition.area_sizes)
