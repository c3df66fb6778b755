import numpy as np
import pytest

import labelvar as lv
from labelvar.seeding import derive_seed

# the default toy setup the experiment-level tests run on
TOY = {
    "kind": "blobs",
    "classes": 3,
    "train_samples": 5000,
    "test_samples": 2000,
    "noise": 0.13,
    "n_features": 8,
    "num_areas": 50,
    "num_passes": 50,
    "dropout_rate": 0.5,
    "epochs": 30,
}
GAUSS_SEVERITIES = (1, 2, 3, 4)


def build_bundle(seed):
    """Train the default model and precompute everything the
    experiment-level tests share: split halves, their prediction
    matrices, and matrices plus true accuracies for corrupted variants."""
    import time

    t0 = time.perf_counter()
    total = TOY["train_samples"] + TOY["test_samples"]
    X, y = lv.synth_dataset(
        TOY["kind"], TOY["classes"], total, TOY["noise"], derive_seed(seed, 0), TOY["n_features"]
    )
    train_X, train_y = X[: TOY["train_samples"]], y[: TOY["train_samples"]]
    test_X, test_y = X[TOY["train_samples"] :], y[TOY["train_samples"] :]
    model = lv.train_sgd(
        train_X,
        train_y,
        lv.TrainConfig(epochs=TOY["epochs"], seed=derive_seed(seed, 1)),
        dropout_rate=TOY["dropout_rate"],
    )
    ref_X, ref_y, new_X, new_y = lv.split_halves(test_X, test_y, derive_seed(seed, 2))
    ref_m = lv.mc_predict(model, ref_X, TOY["num_passes"], derive_seed(seed, 3))
    new_m = lv.mc_predict(model, new_X, TOY["num_passes"], derive_seed(seed, 4))
    core_seconds = time.perf_counter() - t0

    shifted = {}
    for sv in GAUSS_SEVERITIES:
        cX = lv.corrupt_dataset(new_X, "gaussian_noise", sv, derive_seed(seed, 5, sv))
        cm = lv.mc_predict(model, cX, TOY["num_passes"], derive_seed(seed, 6, sv))
        shifted[sv] = {
            "matrix": cm,
            "true_acc": lv.evaluate_accuracy(model, cX, new_y),
        }
    return {
        "seed": seed,
        "model": model,
        "ref": (ref_X, ref_y, ref_m),
        "new": (new_X, new_y, new_m),
        "new_true_acc": lv.evaluate_accuracy(model, new_X, new_y),
        "shifted": shifted,
        "core_seconds": core_seconds,
    }


@pytest.fixture(scope="session")
def bundles():
    return [build_bundle(seed) for seed in range(5)]


@pytest.fixture(scope="session")
def small_model():
    """A quickly trained model for tests that just need a working classifier."""
    X, y = lv.synth_dataset("blobs", 3, 900, 0.1, seed=derive_seed(777, 0))
    model = lv.train_sgd(
        X[:600], y[:600], lv.TrainConfig(epochs=12, seed=derive_seed(777, 1)),
        hidden=(32, 32), dropout_rate=0.5,
    )
    return model, X[600:], y[600:]
