"""Selection-based accuracy estimation baselines.

Both baselines spend a labeling budget: they pick a subset of the new set,
"label" it (here the labels are already known, this is a simulation), and
report the model's accuracy on the subset as the estimate for the whole
set.  Random selection samples uniformly without replacement; the
cross-entropy sampler greedily grows a subset whose binned feature
distribution stays close to the full set's.
"""

import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError
from .mlp import MlpModel, evaluate_accuracy
from .seeding import spawn_rng

__all__ = [
    "SelectionBudget",
    "CesConfig",
    "random_select_estimate",
    "ces_select_indices",
    "ces_select_estimate",
    "feature_cross_entropy",
    "compare_report",
]

DEFAULT_BUDGETS = tuple(range(50, 181, 10))


@dataclass(frozen=True)
class SelectionBudget:
    sizes: tuple = DEFAULT_BUDGETS
    seed: int = 0

    def __post_init__(self):
        if any(b < 1 for b in self.sizes):
            raise InvalidConfigError(f"budgets must be >= 1, got {self.sizes}")


@dataclass(frozen=True)
class CesConfig:
    """Knobs of the cross-entropy sampler.

    It starts from ``initial_size`` random samples and repeatedly adds the
    best of ``num_groups`` candidate groups of ``group_size`` samples,
    where best means lowest cross-entropy between the subset's and the
    full set's per-dimension binned feature distributions.
    """

    initial_size: int = 30
    group_size: int = 5
    num_groups: int = 30
    num_bins: int = 20

    def __post_init__(self):
        if min(self.initial_size, self.group_size, self.num_groups, self.num_bins) < 1:
            raise InvalidConfigError("all cross-entropy sampler sizes must be >= 1")


def random_select_estimate(model: MlpModel, features, labels, budget: int, seed: int) -> float:
    """Accuracy on a uniform without-replacement subset of size ``budget``."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    n = features.shape[0]
    if budget > n:
        raise InvalidInputError(f"budget {budget} exceeds dataset size {n}")
    if budget < 1:
        raise InvalidInputError(f"budget must be >= 1, got {budget}")
    idx = spawn_rng(seed).choice(n, size=budget, replace=False)
    return evaluate_accuracy(model, features[idx], labels[idx])


def _bin_indices(representation: np.ndarray, num_bins: int):
    """Per-dimension equal-width bin index of every sample.

    Dimensions without spread carry no information and are dropped; returns
    ``None`` if every dimension is degenerate.
    """
    lo = representation.min(axis=0)
    hi = representation.max(axis=0)
    keep = hi > lo
    if not keep.any():
        return None
    rep = representation[:, keep]
    lo, hi = lo[keep], hi[keep]
    scaled = (rep - lo) / (hi - lo) * num_bins
    return np.clip(scaled.astype(np.int64), 0, num_bins - 1)


def feature_cross_entropy(full_counts, subset_counts, subset_size: int, num_bins: int) -> float:
    """Cross-entropy of the full set's binned distribution against the
    subset's add-one-smoothed one, summed over feature dimensions."""
    q = full_counts / full_counts.sum(axis=1, keepdims=True)
    p = (subset_counts + 1.0) / (subset_size + num_bins)
    return float(-(q * np.log(p)).sum())


def ces_select_indices(representation, budget: int, cfg: CesConfig = CesConfig(), seed: int = 0):
    """Indices of the cross-entropy-guided subset, without duplicates.

    Returns ``None`` when the representation has no spread in any
    dimension; callers should fall back to random selection then.
    """
    representation = np.asarray(representation, dtype=np.float64)
    n = representation.shape[0]
    if budget > n:
        raise InvalidInputError(f"budget {budget} exceeds dataset size {n}")
    if budget < cfg.initial_size:
        raise InvalidInputError(
            f"budget {budget} is smaller than the initial subset size {cfg.initial_size}"
        )

    bins = _bin_indices(representation, cfg.num_bins)
    if bins is None:
        return None

    dims = bins.shape[1]
    # per-sample one-hot bin counts folded dimension-wise
    full_counts = np.zeros((dims, cfg.num_bins))
    for d in range(dims):
        full_counts[d] = np.bincount(bins[:, d], minlength=cfg.num_bins)

    rng = spawn_rng(seed)
    selected = list(rng.choice(n, size=cfg.initial_size, replace=False))
    in_subset = np.zeros(n, dtype=bool)
    in_subset[selected] = True
    subset_counts = np.zeros((dims, cfg.num_bins))
    for d in range(dims):
        subset_counts[d] = np.bincount(bins[selected, d], minlength=cfg.num_bins)

    while len(selected) < budget:
        step = min(cfg.group_size, budget - len(selected))
        pool = np.flatnonzero(~in_subset)
        best_group = None
        best_ce = np.inf
        for _ in range(cfg.num_groups):
            group = rng.choice(pool, size=step, replace=False)
            trial = subset_counts.copy()
            for d in range(dims):
                trial[d] += np.bincount(bins[group, d], minlength=cfg.num_bins)
            ce = feature_cross_entropy(full_counts, trial, len(selected) + step, cfg.num_bins)
            if ce < best_ce:
                best_ce = ce
                best_group = group
        for d in range(dims):
            subset_counts[d] += np.bincount(bins[best_group, d], minlength=cfg.num_bins)
        selected.extend(int(i) for i in best_group)
        in_subset[best_group] = True

    return np.array(selected)


def ces_select_estimate(
    model: MlpModel,
    features,
    labels,
    representation,
    budget: int,
    cfg: CesConfig = CesConfig(),
    seed: int = 0,
) -> float:
    """Cross-entropy-guided subset selection, then accuracy on the subset.

    ``representation`` is the feature space the distributions are compared
    in, typically the model's last hidden layer (see ``hidden_features``).
    Falls back to random selection with a warning when the representation
    has no spread in any dimension.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    n = features.shape[0]
    if np.asarray(representation).shape[0] != n:
        raise InvalidInputError(
            f"{n} samples but {np.asarray(representation).shape[0]} representation rows"
        )
    idx = ces_select_indices(representation, budget, cfg, seed)
    if idx is None:
        _warnings.warn(
            "representation has zero variance in every dimension; "
            "falling back to random selection"
        )
        return random_select_estimate(model, features, labels, budget, seed)
    return evaluate_accuracy(model, features[idx], labels[idx])


def compare_report(aries_estimate: float, baseline_estimates: dict, true_acc: float):
    """Absolute-error table: one row per budget, one column per method.

    ``baseline_estimates`` maps method name to ``{budget: estimate}``.  The
    budget-free estimate's error repeats on every row for side-by-side
    reading.  Returns a list of plain dicts, ready for tabular or
    line-delimited output.
    """
    budgets = sorted({b for per in baseline_estimates.values() for b in per})
    rows = []
    for budget in budgets:
        row = {"budget": int(budget), "estimator_error": abs(aries_estimate - true_acc)}
        for method, per_budget in sorted(baseline_estimates.items()):
            if budget in per_budget:
                row[f"{method}_error"] = abs(per_budget[budget] - true_acc)
        rows.append(row)
    return rows
