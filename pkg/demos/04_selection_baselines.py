"""Label-free estimation vs labeling-budget baselines.

The selection baselines answer the same question ("how accurate is the
model on this new set?") by actually labeling a small subset: random
sampling, and a greedy sampler that keeps the subset's hidden-feature
distribution close to the full set's (minimum cross-entropy).  Both
improve with budget; the variation estimator spends no labels at all, so
its error column is constant.
"""

import labelvar as lv
from labelvar.baselines import ces_select_estimate, compare_report, random_select_estimate
from labelvar.mlp import hidden_features
from labelvar.seeding import derive_seed

SEED = 7
PASSES = 50

X, y = lv.synth_dataset("blobs", classes=3, n_samples=3600, noise=0.13, seed=derive_seed(SEED, 0))
model = lv.train_sgd(
    X[:2400], y[:2400], lv.TrainConfig(epochs=30, seed=derive_seed(SEED, 1)), dropout_rate=0.5
)
ref_X, ref_y, new_X, new_y = lv.split_halves(X[2400:], y[2400:], derive_seed(SEED, 2))
shifted_X = lv.corrupt_dataset(new_X, "gaussian_noise", 2, derive_seed(SEED, 3))
true_acc = lv.evaluate_accuracy(model, shifted_X, new_y)

ref_m = lv.mc_predict(model, ref_X, PASSES, derive_seed(SEED, 4))
new_m = lv.mc_predict(model, shifted_X, PASSES, derive_seed(SEED, 5))
result = lv.estimate(ref_m, ref_y, new_m, lv.EstimationConfig(num_areas=PASSES))
print(f"true accuracy {true_acc:.4f}; label-free estimate {result.acc_new:.4f}")

rep = hidden_features(model, shifted_X)
budgets = lv.SelectionBudget().sizes  # 50 .. 180 in steps of 10
random_per, ces_per = {}, {}
for b_idx, budget in enumerate(budgets):
    random_per[budget] = random_select_estimate(
        model, shifted_X, new_y, budget, derive_seed(SEED, 6, b_idx)
    )
    ces_per[budget] = ces_select_estimate(
        model, shifted_X, new_y, rep, budget, seed=derive_seed(SEED, 7, b_idx)
    )

rows = compare_report(result.acc_new, {"random": random_per, "ces": ces_per}, true_acc)
print(f"\n{'budget':>6} {'random err':>11} {'ces err':>9} {'label-free err':>15}")
for row in rows:
    print(
        f"{row['budget']:>6} {row['random_error']:>11.4f} "
        f"{row['ces_error']:>9.4f} {row['estimator_error']:>15.4f}"
    )
