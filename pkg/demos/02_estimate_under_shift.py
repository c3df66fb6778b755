"""Estimate accuracy on unlabeled, distribution-shifted data.

Train the toy classifier on clean blobs, keep one labeled half of the test
split as the reference, then estimate the accuracy of increasingly noisy
copies of the other half WITHOUT using their labels.  The labels are only
consulted afterwards, to report how far off each estimate was.

The two sub-estimates tend to bracket the truth under shift: the area
transfer (acc1) usually over-estimates, the confidence-fraction scaling
(acc2) under-estimates, and their average lands close.
"""

import labelvar as lv
from labelvar.seeding import derive_seed

SEED = 0
AREAS = PASSES = 50

X, y = lv.synth_dataset("blobs", classes=3, n_samples=4000, noise=0.13, seed=derive_seed(SEED, 0))
model = lv.train_sgd(
    X[:3000], y[:3000], lv.TrainConfig(epochs=30, seed=derive_seed(SEED, 1)), dropout_rate=0.5
)
ref_X, ref_y, new_X, new_y = lv.split_halves(X[3000:], y[3000:], derive_seed(SEED, 2))
print(f"reference half: {len(ref_X)} labeled samples; new half: {len(new_X)} samples")

ref_matrix = lv.mc_predict(model, ref_X, PASSES, derive_seed(SEED, 3))

print(f"\n{'severity':>8} {'true':>7} {'acc1':>7} {'acc2':>7} {'acc_new':>8} {'|err|':>7}")
for severity in range(4):
    shifted_X = lv.corrupt_dataset(new_X, "gaussian_noise", severity, derive_seed(SEED, 4, severity))
    new_matrix = lv.mc_predict(model, shifted_X, PASSES, derive_seed(SEED, 5, severity))
    result = lv.estimate(ref_matrix, ref_y, new_matrix, lv.EstimationConfig(num_areas=AREAS))
    true_acc = lv.evaluate_accuracy(model, shifted_X, new_y)  # labels used only for scoring
    print(
        f"{severity:>8} {true_acc:>7.4f} {result.acc1:>7.4f} {result.acc2:>7.4f} "
        f"{result.acc_new:>8.4f} {abs(result.acc_new - true_acc):>7.4f}"
    )

print("\nper-area diagnostics for the last run (areas holding data):")
for row in result.per_area:
    if row.ref_size or row.new_size:
        acc = "  --  " if row.empty else f"{row.ref_accuracy:.4f}"
        print(f"  area {row.index:>2}: ref {row.ref_size:>4}  new {row.new_size:>4}  ref acc {acc}")
for warning in result.warnings:
    print("  warning:", warning)
