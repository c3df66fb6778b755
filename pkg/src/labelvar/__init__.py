"""labelvar: estimate a classifier's accuracy on unlabeled data.

The estimate is built from the distribution of label variation ratios
(LVR) over repeated stochastic predictions: run the model T times with
dropout active (or once per mutant in an ensemble), bucket samples into
areas by how consistently they are labeled, learn each area's accuracy
from labeled reference data, and transfer those accuracies to the new,
unlabeled set.
"""

from .errors import (
    DegenerateReferenceError,
    GateStarvationError,
    InvalidConfigError,
    InvalidInputError,
    LabelVarError,
    OperatorInapplicableError,
    ParseError,
)
from .lvr import (
    AreaAccuracy,
    AreaPartition,
    LabelMatrix,
    LvrVector,
    area_accuracy,
    compute_lvr,
    dominant_label,
    dominant_stats,
    partition_areas,
)
from .estimator import (
    EstimationConfig,
    EstimationResult,
    SweepCell,
    estimate,
    estimate_acc1,
    estimate_acc2,
    estimate_from_area_stats,
    sweep,
)
from .mlp import (
    MlpModel,
    TrainConfig,
    evaluate_accuracy,
    forward_deterministic,
    forward_dropout,
    hidden_features,
    init_model,
    mc_predict,
    predict_labels,
    predict_proba,
    train_sgd,
)
from .mutation import (
    MutantEnsemble,
    MutationConfig,
    apply_operator,
    generate_mutants,
    mutant_predict,
    mutate_model,
)
from .corruptions import CORRUPTIONS, corrupt_dataset
from .datasets import synth_dataset
from .baselines import (
    CesConfig,
    SelectionBudget,
    ces_select_estimate,
    compare_report,
    random_select_estimate,
)
from .studies import (
    area_agreement,
    area_agreement_study,
    confidence_accuracy_study,
    split_halves,
    top_area_fraction,
)
from .seeding import derive_seed, spawn_rng

__version__ = "0.1.0"
