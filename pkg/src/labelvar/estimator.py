"""Accuracy estimation for unlabeled data from area statistics.

The estimator combines two readings of the labeled reference set:

* ``acc1`` transfers each reference area's measured accuracy to the new
  set's occupancy of that area (a sample-weighted sum over areas);
* ``acc2`` scales the reference accuracy by how the fraction of
  top-confidence samples (the last area) changed between the two sets;
* ``acc_new`` is their unweighted average, the headline estimate.

The per-area bookkeeping is done in exact rational arithmetic and rounded
to float once at the end.  That keeps two properties testable to the bit:
estimating a set against itself returns exactly its own accuracy, and the
vectorized pipeline agrees exactly with a naive loop implementation.
"""

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateReferenceError, InvalidConfigError, InvalidInputError
from .lvr import LabelMatrix, area_accuracy, compute_lvr, dominant_stats, partition_areas

__all__ = [
    "EstimationConfig",
    "AreaRow",
    "EstimationResult",
    "SweepCell",
    "estimate_from_area_stats",
    "estimate_acc1",
    "estimate_acc2",
    "estimate",
    "sweep",
]

EMPTY_AREA_POLICIES = ("zero", "nearest")


@dataclass(frozen=True)
class EstimationConfig:
    """Estimator settings.

    ``num_passes`` defaults to ``num_areas`` so every sample in an area
    shares one LVR value; it only matters to callers that generate
    prediction matrices (the estimate itself reads T off its inputs).
    """

    num_areas: int = 50
    num_passes: int | None = None
    empty_area_policy: str = "zero"
    clamp_to_unit: bool = False

    def __post_init__(self):
        if self.num_areas < 1:
            raise InvalidConfigError(f"num_areas must be >= 1, got {self.num_areas}")
        if self.num_passes is not None and self.num_passes < 1:
            raise InvalidConfigError(f"num_passes must be >= 1, got {self.num_passes}")
        if self.empty_area_policy not in EMPTY_AREA_POLICIES:
            raise InvalidConfigError(
                f"empty_area_policy must be one of {EMPTY_AREA_POLICIES}, "
                f"got {self.empty_area_policy!r}"
            )

    @property
    def effective_num_passes(self) -> int:
        return self.num_areas if self.num_passes is None else self.num_passes


@dataclass(frozen=True)
class AreaRow:
    """Diagnostics for one area: occupancy on both sides plus the measured
    reference accuracy (NaN when the reference side is empty)."""

    index: int
    ref_size: int
    new_size: int
    ref_accuracy: float
    empty: bool


@dataclass(frozen=True)
class EstimationResult:
    acc1: float
    acc2: float
    acc_new: float
    acc_ori: float
    per_area: tuple
    warnings: tuple


@dataclass(frozen=True)
class SweepCell:
    num_areas: int
    dropout_rate: float
    result: EstimationResult


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def _resolve_area_fractions(area_acc, new_sizes, policy, warnings):
    """Fill empty reference areas per policy, warning when they matter."""
    nonempty = [t for t, a in enumerate(area_acc) if a is not None]
    resolved = []
    for t, a in enumerate(area_acc):
        if a is not None:
            resolved.append(_as_fraction(a))
            continue
        if policy == "nearest" and nonempty:
            donor = min(nonempty, key=lambda j: (abs(j - t), j))
            fill = _as_fraction(area_acc[donor])
            how = f"borrowing accuracy from nearest nonempty area {donor}"
        else:
            fill = Fraction(0)
            how = "assigning accuracy 0"
        if new_sizes[t] > 0:
            warnings.append(
                f"reference area {t} is empty but holds {int(new_sizes[t])} "
                f"new samples; {how}"
            )
        resolved.append(fill)
    return resolved


def estimate_from_area_stats(
    area_acc,
    ref_sizes,
    new_sizes,
    acc_ori,
    *,
    empty_area_policy: str = "zero",
    clamp_to_unit: bool = False,
) -> EstimationResult:
    """Run the estimation arithmetic on per-area summary statistics.

    Parameters
    ----------
    area_acc:
        Per-area reference accuracies, one entry per area.  Entries may be
        floats, exact ``Fraction`` values, or ``None`` for empty areas.
    ref_sizes, new_sizes:
        Per-area sample counts of the reference and the new set.
    acc_ori:
        Overall accuracy of the reference set (float or ``Fraction``).

    This is the entry point for callers that already have area statistics,
    for example hand-tabulated ones; the matrix-level :func:`estimate`
    reduces to it.
    """
    ref_sizes = [int(s) for s in ref_sizes]
    new_sizes = [int(s) for s in new_sizes]
    n = len(area_acc)
    if n < 1 or len(ref_sizes) != n or len(new_sizes) != n:
        raise InvalidInputError(
            f"area statistics disagree on the number of areas: "
            f"{n} accuracies, {len(ref_sizes)} ref sizes, {len(new_sizes)} new sizes"
        )
    new_total = sum(new_sizes)
    ref_total = sum(ref_sizes)
    if new_total == 0:
        raise InvalidInputError("the new set is empty; nothing to estimate")
    if ref_total == 0:
        raise InvalidInputError("the reference set is empty")

    warnings: list[str] = []
    resolved = _resolve_area_fractions(area_acc, new_sizes, empty_area_policy, warnings)

    correct = sum((Fraction(m) * a for m, a in zip(new_sizes, resolved)), Fraction(0))
    acc1 = float(correct / new_total)

    if ref_sizes[-1] == 0:
        raise DegenerateReferenceError(
            f"top reference area {n - 1} is empty; the confidence-fraction "
            f"estimate is undefined (acc1 alone would be {acc1:.4f})"
        )
    acc_ori_frac = _as_fraction(acc_ori)
    ratio = Fraction(new_sizes[-1], new_total) / Fraction(ref_sizes[-1], ref_total)
    acc2 = float(ratio * acc_ori_frac)
    if clamp_to_unit and not 0.0 <= acc2 <= 1.0:
        warnings.append(f"confidence-fraction estimate {acc2:.4f} clamped to [0, 1]")
        acc2 = min(1.0, max(0.0, acc2))

    acc_new = (acc1 + acc2) / 2

    per_area = tuple(
        AreaRow(
            index=t,
            ref_size=ref_sizes[t],
            new_size=new_sizes[t],
            ref_accuracy=float(_as_fraction(area_acc[t])) if area_acc[t] is not None else float("nan"),
            empty=area_acc[t] is None,
        )
        for t in range(n)
    )
    return EstimationResult(
        acc1=acc1,
        acc2=acc2,
        acc_new=acc_new,
        acc_ori=float(acc_ori_frac),
        per_area=per_area,
        warnings=tuple(warnings),
    )


def _pipeline_stats(ref: LabelMatrix, ref_labels, new: LabelMatrix, cfg: EstimationConfig):
    """Area statistics shared by the sub-estimators."""
    ref_labels = np.asarray(ref_labels)
    if ref_labels.shape[0] != ref.num_samples:
        raise InvalidInputError(
            f"reference has {ref.num_samples} samples but {ref_labels.shape[0]} labels"
        )
    if ref.num_classes != new.num_classes:
        raise InvalidInputError(
            f"class count mismatch: reference has {ref.num_classes}, new has {new.num_classes}"
        )
    if ref.num_passes != new.num_passes:
        raise InvalidInputError(
            f"pass count mismatch: reference has {ref.num_passes}, new has {new.num_passes}"
        )

    ref_dom, _ = dominant_stats(ref)
    ref_part = partition_areas(compute_lvr(ref), cfg.num_areas)
    ref_aa = area_accuracy(ref_part, ref_labels, ref_dom)
    new_part = partition_areas(compute_lvr(new), cfg.num_areas)

    area_acc = [
        Fraction(int(c), int(s)) if s > 0 else None
        for c, s in zip(ref_aa.correct, ref_aa.sizes)
    ]
    acc_ori = Fraction(int(ref_aa.correct.sum()), ref.num_samples)
    return area_acc, ref_aa.sizes.tolist(), new_part.area_sizes.tolist(), acc_ori


def estimate(ref: LabelMatrix, ref_labels, new: LabelMatrix, cfg: EstimationConfig = EstimationConfig()) -> EstimationResult:
    """Estimate the accuracy of the model on the unlabeled ``new`` set.

    ``ref`` must come with true labels; both matrices must share the class
    count and the number of passes.  The reference accuracy entering the
    arithmetic is measured under the dominant-label criterion, the same one
    used for the per-area accuracies.
    """
    area_acc, ref_sizes, new_sizes, acc_ori = _pipeline_stats(ref, ref_labels, new, cfg)
    return estimate_from_area_stats(
        area_acc,
        ref_sizes,
        new_sizes,
        acc_ori,
        empty_area_policy=cfg.empty_area_policy,
        clamp_to_unit=cfg.clamp_to_unit,
    )


def estimate_acc1(ref: LabelMatrix, ref_labels, new: LabelMatrix, cfg: EstimationConfig = EstimationConfig()):
    """Area-transfer estimate alone; returns ``(acc1, per_area)``."""
    result = estimate(ref, ref_labels, new, cfg)
    return result.acc1, result.per_area


def estimate_acc2(ref: LabelMatrix, ref_labels, new: LabelMatrix, cfg: EstimationConfig = EstimationConfig()) -> float:
    """Confidence-fraction estimate alone."""
    return estimate(ref, ref_labels, new, cfg).acc2


def sweep(
    model,
    ref_features,
    ref_labels,
    new_features,
    area_counts,
    dropout_rates,
    master_seed: int,
    *,
    empty_area_policy: str = "zero",
    clamp_to_unit: bool = False,
):
    """Re-run the full pipeline over a grid of area counts and dropout rates.

    Each cell re-predicts both sets with ``T = num_areas`` stochastic passes
    at the cell's dropout rate, then estimates.  Cells are seeded by grid
    position, so results do not depend on evaluation order.  Returns a flat
    list of :class:`SweepCell`, area-count major.
    """
    from .mlp import mc_predict
    from .seeding import derive_seed

    cells = []
    for i, n in enumerate(area_counts):
        for j, rate in enumerate(dropout_rates):
            variant = dataclasses.replace(model, dropout_rate=float(rate))
            ref_m = mc_predict(variant, ref_features, n, derive_seed(master_seed, i, j, 0))
            new_m = mc_predict(variant, new_features, n, derive_seed(master_seed, i, j, 1))
            cfg = EstimationConfig(
                num_areas=n,
                empty_area_policy=empty_area_policy,
                clamp_to_unit=clamp_to_unit,
            )
            cells.append(
                SweepCell(
                    num_areas=int(n),
                    dropout_rate=float(rate),
                    result=estimate(ref_m, ref_labels, new_m, cfg),
                )
            )
    return cells
