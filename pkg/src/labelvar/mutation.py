"""Model-level mutation operators and gated mutant ensembles.

Mutants are lightly perturbed copies of a trained model.  An ensemble of K
accepted mutants plays the same role as K dropout passes: each mutant's
deterministic prediction becomes one column of a label matrix.

Two weight-level operators (Gaussian fuzzing, per-neuron weight shuffling)
and three neuron-level operators (effect block, activation inversion,
neuron switch) are provided, plus ``random``, which picks one of the five
per mutant.  A quality gate keeps only candidates whose reference accuracy
stays above a threshold fraction of the original model's.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    GateStarvationError,
    InvalidConfigError,
    InvalidInputError,
    OperatorInapplicableError,
)
from .lvr import LabelMatrix
from .mlp import MlpModel, evaluate_accuracy, predict_labels
from .seeding import spawn_rng

__all__ = [
    "OPERATORS",
    "MutationConfig",
    "MutantRecord",
    "MutantEnsemble",
    "apply_operator",
    "mutate_model",
    "generate_mutants",
    "mutant_predict",
]

OPERATORS = (
    "gaussian_fuzz",
    "weight_shuffle",
    "neuron_effect_block",
    "neuron_activation_inverse",
    "neuron_switch",
)


@dataclass(frozen=True)
class MutationConfig:
    operator: str = "random"
    mutation_ratio: float = 0.1
    accuracy_threshold: float = 0.9
    num_mutants: int = 50
    seed: int = 0
    attempt_factor: int = 20

    def __post_init__(self):
        if self.operator != "random" and self.operator not in OPERATORS:
            raise InvalidConfigError(
                f"unknown operator {self.operator!r}; choose from {OPERATORS + ('random',)}"
            )
        if not 0.0 <= self.mutation_ratio <= 1.0:
            raise InvalidConfigError(f"mutation ratio must lie in [0, 1], got {self.mutation_ratio}")
        if not 0.0 < self.accuracy_threshold <= 1.0:
            raise InvalidConfigError(
                f"accuracy threshold must lie in (0, 1], got {self.accuracy_threshold}"
            )
        if self.num_mutants < 1:
            raise InvalidConfigError(f"num_mutants must be >= 1, got {self.num_mutants}")
        if self.attempt_factor < 1:
            raise InvalidConfigError(f"attempt_factor must be >= 1, got {self.attempt_factor}")


@dataclass(frozen=True)
class MutantRecord:
    """Provenance of one candidate: what was mutated and how it fared."""

    index: int
    operator: str
    seed: int
    touched: tuple
    gate_accuracy: float
    accepted: bool


@dataclass(frozen=True)
class MutantEnsemble:
    mutants: tuple
    provenance: tuple
    gate_report: tuple

    @property
    def size(self) -> int:
        return len(self.mutants)


def _hidden_neurons(model: MlpModel):
    """(layer, unit) pairs for all hidden neurons; layer indexes weights,
    so neuron (l, j) has incoming ``weights[l][:, j]`` and outgoing
    ``weights[l + 1][j, :]``."""
    return [(l, j) for l, width in enumerate(model.hidden_sizes) for j in range(width)]


def _select(rng: np.random.Generator, population: int, ratio: float) -> np.ndarray:
    count = round(ratio * population)
    if count == 0:
        return np.empty(0, dtype=np.int64)
    return np.sort(rng.choice(population, size=count, replace=False))


def _gaussian_fuzz(model, ratio, rng):
    sizes = [w.size for w in model.weights]
    total = sum(sizes)
    chosen = _select(rng, total, ratio)
    weights = [w.copy() for w in model.weights]
    offsets = np.cumsum([0] + sizes)
    sigmas = [w.std() for w in model.weights]
    touched = []
    for flat in chosen:
        l = int(np.searchsorted(offsets, flat, side="right")) - 1
        local = int(flat - offsets[l])
        weights[l].flat[local] += rng.normal(0.0, sigmas[l]) if sigmas[l] > 0 else 0.0
        touched.append(("weight", l, local))
    return weights, [b.copy() for b in model.biases], touched


def _weight_shuffle(model, ratio, rng):
    # population: every neuron with incoming weights (hidden and output)
    neurons = [(l, j) for l in range(len(model.weights)) for j in range(model.layer_sizes[l + 1])]
    chosen = _select(rng, len(neurons), ratio)
    weights = [w.copy() for w in model.weights]
    touched = []
    for idx in chosen:
        l, j = neurons[int(idx)]
        perm = rng.permutation(weights[l].shape[0])
        weights[l][:, j] = weights[l][perm, j]
        touched.append(("neuron", l + 1, j))
    return weights, [b.copy() for b in model.biases], touched


def _neuron_effect_block(model, ratio, rng):
    neurons = _hidden_neurons(model)
    chosen = _select(rng, len(neurons), ratio)
    weights = [w.copy() for w in model.weights]
    touched = []
    for idx in chosen:
        l, j = neurons[int(idx)]
        weights[l + 1][j, :] = 0.0
        touched.append(("neuron", l + 1, j))
    return weights, [b.copy() for b in model.biases], touched


def _neuron_activation_inverse(model, ratio, rng):
    # flipping the sign of a neuron's activation output is equivalent to
    # negating its outgoing weights, which keeps the model a plain
    # weight/bias container
    neurons = _hidden_neurons(model)
    chosen = _select(rng, len(neurons), ratio)
    weights = [w.copy() for w in model.weights]
    touched = []
    for idx in chosen:
        l, j = neurons[int(idx)]
        weights[l + 1][j, :] = -weights[l + 1][j, :]
        touched.append(("neuron", l + 1, j))
    return weights, [b.copy() for b in model.biases], touched


def _neuron_switch(model, ratio, rng):
    eligible = [l for l, width in enumerate(model.hidden_sizes) if width >= 2]
    if not eligible:
        raise OperatorInapplicableError(
            "neuron_switch needs a hidden layer of width >= 2, "
            f"got hidden sizes {model.hidden_sizes}"
        )
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    touched = []
    for l in eligible:
        width = model.hidden_sizes[l]
        num_pairs = round(ratio * (width // 2))
        if num_pairs == 0:
            continue
        picked = rng.choice(width, size=2 * num_pairs, replace=False)
        for a, b in zip(picked[0::2], picked[1::2]):
            a, b = int(a), int(b)
            weights[l][:, [a, b]] = weights[l][:, [b, a]]
            biases[l][[a, b]] = biases[l][[b, a]]
            weights[l + 1][[a, b], :] = weights[l + 1][[b, a], :]
            touched.append(("pair", l + 1, a, b))
    return weights, biases, touched


_OPERATOR_FNS = {
    "gaussian_fuzz": _gaussian_fuzz,
    "weight_shuffle": _weight_shuffle,
    "neuron_effect_block": _neuron_effect_block,
    "neuron_activation_inverse": _neuron_activation_inverse,
    "neuron_switch": _neuron_switch,
}


def apply_operator(model: MlpModel, operator: str, ratio: float, rng: np.random.Generator):
    """Apply one named operator; returns ``(mutant, touched)``.

    ``touched`` lists the mutated elements (weights, neurons, or neuron
    pairs depending on the operator) for provenance and ratio accounting.
    """
    if operator not in _OPERATOR_FNS:
        raise InvalidConfigError(f"unknown operator {operator!r}")
    weights, biases, touched = _OPERATOR_FNS[operator](model, ratio, rng)
    mutant = MlpModel(
        layer_sizes=model.layer_sizes,
        weights=tuple(weights),
        biases=tuple(biases),
        dropout_rate=model.dropout_rate,
    )
    return mutant, tuple(touched)


def _resolve_operator(cfg: MutationConfig, rng: np.random.Generator) -> str:
    if cfg.operator == "random":
        return OPERATORS[int(rng.integers(len(OPERATORS)))]
    return cfg.operator


def mutate_model(model: MlpModel, cfg: MutationConfig, mutant_seed: int) -> MlpModel:
    """One mutant of ``model``, deterministic given ``(cfg, mutant_seed)``."""
    rng = spawn_rng(cfg.seed, mutant_seed)
    operator = _resolve_operator(cfg, rng)
    mutant, _ = apply_operator(model, operator, cfg.mutation_ratio, rng)
    return mutant


def generate_mutants(model: MlpModel, ref_features, ref_labels, cfg: MutationConfig) -> MutantEnsemble:
    """Sample candidates until ``cfg.num_mutants`` pass the quality gate.

    A candidate is accepted iff its accuracy on the reference set is at
    least ``accuracy_threshold`` times the original model's (a relative
    gate, so the bar adapts to the base accuracy).  Candidate seeds follow
    the attempt index, so the full accept/reject sequence is reproducible.
    Raises :class:`GateStarvationError` after ``attempt_factor * K``
    attempts.
    """
    ref_features = np.asarray(ref_features, dtype=np.float64)
    if ref_features.shape[0] == 0:
        raise InvalidInputError("reference set for the mutation gate is empty")
    base_acc = evaluate_accuracy(model, ref_features, ref_labels)
    bar = cfg.accuracy_threshold * base_acc

    mutants = []
    provenance = []
    report = []
    max_attempts = cfg.attempt_factor * cfg.num_mutants
    for attempt in range(max_attempts):
        rng = spawn_rng(cfg.seed, attempt)
        operator = _resolve_operator(cfg, rng)
        mutant, touched = apply_operator(model, operator, cfg.mutation_ratio, rng)
        acc = evaluate_accuracy(mutant, ref_features, ref_labels)
        accepted = acc >= bar
        record = MutantRecord(
            index=attempt,
            operator=operator,
            seed=attempt,
            touched=touched,
            gate_accuracy=acc,
            accepted=accepted,
        )
        report.append(record)
        if accepted:
            mutants.append(mutant)
            provenance.append(record)
            if len(mutants) == cfg.num_mutants:
                return MutantEnsemble(
                    mutants=tuple(mutants),
                    provenance=tuple(provenance),
                    gate_report=tuple(report),
                )
    raise GateStarvationError(
        f"only {len(mutants)} of {cfg.num_mutants} mutants passed the gate "
        f"(threshold {cfg.accuracy_threshold} x base accuracy {base_acc:.4f}) "
        f"in {max_attempts} attempts; acceptance rate {len(mutants) / max_attempts:.3f}",
        attempts=max_attempts,
        accepted=len(mutants),
    )


def mutant_predict(ensemble: MutantEnsemble, X) -> LabelMatrix:
    """Label matrix with one column per mutant's deterministic prediction.

    Drop-in replacement for Monte-Carlo dropout prediction with T equal to
    the ensemble size.
    """
    if ensemble.size == 0:
        raise InvalidInputError("mutant ensemble is empty")
    X = np.asarray(X, dtype=np.float64)
    columns = [predict_labels(m, X) for m in ensemble.mutants]
    return LabelMatrix(
        labels=np.stack(columns, axis=1),
        num_classes=ensemble.mutants[0].num_classes,
    )
