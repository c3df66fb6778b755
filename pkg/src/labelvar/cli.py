"""Command-line pipeline: train, predict, estimate, sweep, corrupt,
baseline, replicate.

Every command accepts ``--seed`` (falling back to ``$LABELVAR_SEED``, then
0) and ``--out``, writes its artifacts under the output directory, and
emits a run manifest with digests of everything it read and wrote.  Exit
codes: 0 success, 2 bad input, 3 bad configuration, 4 degenerate
reference data.
"""

import dataclasses
import functools
import json
import os
import sys

import click
import numpy as np

from . import baselines as bl
from . import corruptions as corr
from . import formats as fmt
from .datasets import DATASET_KINDS, synth_dataset
from .errors import InvalidInputError, LabelVarError, exit_code_for
from .estimator import EstimationConfig, estimate, sweep as run_sweep
from .mlp import TrainConfig, evaluate_accuracy, hidden_features, mc_predict, train_sgd
from .mutation import MutationConfig, generate_mutants, mutant_predict
from .seeding import derive_seed
from .studies import area_agreement_study, confidence_accuracy_study

SEED_ENV_VAR = "LABELVAR_SEED"


def _resolve_seed(seed):
    if seed is not None:
        return seed
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _common_options(f):
    f = click.option("--seed", type=int, default=None, help=f"Master seed (default: ${SEED_ENV_VAR} or 0).")(f)
    f = click.option("--out", "out_dir", default=".", show_default=True, help="Output directory.")(f)
    return f


def _handle_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except LabelVarError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(exit_code_for(err))

    return wrapper


def _outpath(out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _result_record(result):
    return {
        "acc1": result.acc1,
        "acc2": result.acc2,
        "acc_new": result.acc_new,
        "acc_ori": result.acc_ori,
        "warnings": list(result.warnings),
        "per_area": [dataclasses.asdict(row) for row in result.per_area],
    }


def _print_result(result):
    click.echo(f"  acc1 (area transfer)         {result.acc1:.4f}")
    click.echo(f"  acc2 (confidence fraction)   {result.acc2:.4f}")
    click.echo(f"  acc_new (final estimate)     {result.acc_new:.4f}")
    click.echo(f"  acc_ori (reference)          {result.acc_ori:.4f}")
    for warning in result.warnings:
        click.echo(f"  warning: {warning}")


@click.group()
def main():
    """Label-free accuracy estimation from stochastic predictions."""


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True), default=None, help="Existing dataset (npz).")
@click.option("--kind", type=click.Choice(DATASET_KINDS), default="blobs", show_default=True)
@click.option("--classes", type=int, default=3, show_default=True)
@click.option("--samples", type=int, default=5000, show_default=True)
@click.option("--noise", type=float, default=0.13, show_default=True)
@click.option("--features", "n_features", type=int, default=8, show_default=True)
@click.option("--hidden", default="64,64", show_default=True, help="Hidden layer widths, comma separated.")
@click.option("--rate", type=float, default=0.5, show_default=True, help="Dropout rate.")
@click.option("--lr", type=float, default=0.1, show_default=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--batch", type=int, default=32, show_default=True)
@_common_options
@_handle_errors
def train(data_path, kind, classes, samples, noise, n_features, hidden, rate, lr, epochs, batch, seed, out_dir):
    """Synthesize or load a dataset, fit the toy model, save both."""
    seed = _resolve_seed(seed)
    manifest = fmt.RunManifest(
        command="train",
        seed=seed,
        config={
            "kind": kind, "classes": classes, "samples": samples, "noise": noise,
            "n_features": n_features, "hidden": hidden, "rate": rate,
            "lr": lr, "epochs": epochs, "batch": batch,
        },
    )
    if data_path is not None:
        X, y = fmt.read_dataset(data_path)
        manifest.add_input(data_path)
    else:
        X, y = synth_dataset(kind, classes, samples, noise, derive_seed(seed, 0), n_features)
        data_path = _outpath(out_dir, "dataset.npz")
        fmt.write_dataset(data_path, X, y)
        manifest.add_output(data_path)

    hidden_sizes = tuple(int(h) for h in hidden.split(",") if h)
    cfg = TrainConfig(learning_rate=lr, epochs=epochs, batch_size=batch, seed=derive_seed(seed, 1))
    model = train_sgd(X, y, cfg, hidden=hidden_sizes, dropout_rate=rate)
    model_path = _outpath(out_dir, "model.npz")
    fmt.write_model(model_path, model)
    manifest.add_output(model_path)
    fmt.write_manifest(_outpath(out_dir, "train_manifest.json"), manifest)

    acc = evaluate_accuracy(model, X, y)
    click.echo(f"trained {model.layer_sizes} model; accuracy on its data {acc:.4f}")
    click.echo(f"wrote {model_path}")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--passes", type=int, default=50, show_default=True, help="Stochastic passes T (dropout mode).")
@click.option("--rate", type=float, default=None, help="Override the model's dropout rate.")
@click.option("--mutants", type=int, default=None, help="Use a mutant ensemble of this size instead of dropout.")
@click.option("--operator", default="random", show_default=True)
@click.option("--ratio", type=float, default=0.1, show_default=True)
@click.option("--threshold", type=float, default=0.9, show_default=True)
@click.option("--with-labels/--no-labels", "with_labels", default=True, show_default=True,
              help="Write the true-label column when the dataset has labels.")
@_common_options
@_handle_errors
def predict(model_path, data_path, passes, rate, mutants, operator, ratio, threshold, with_labels, seed, out_dir):
    """Emit a prediction log: T labels per sample plus optional truth."""
    seed = _resolve_seed(seed)
    model = fmt.read_model(model_path)
    X, y = fmt.read_dataset(data_path)
    manifest = fmt.RunManifest(
        command="predict",
        seed=seed,
        config={
            "passes": passes, "rate": rate, "mutants": mutants,
            "operator": operator, "ratio": ratio, "threshold": threshold,
            "with_labels": with_labels,
        },
    )
    manifest.add_input(model_path)
    manifest.add_input(data_path)

    if mutants is not None:
        mcfg = MutationConfig(
            operator=operator,
            mutation_ratio=ratio,
            accuracy_threshold=threshold,
            num_mutants=mutants,
            seed=derive_seed(seed, 0),
        )
        ensemble = generate_mutants(model, X, y, mcfg)
        matrix = mutant_predict(ensemble, X)
        source = "mutants"
        ensemble_path = _outpath(out_dir, "ensemble_manifest.json")
        fmt.write_ensemble_manifest(ensemble_path, ensemble)
        manifest.add_output(ensemble_path)
        click.echo(
            f"generated {ensemble.size} gate-compliant mutants "
            f"({len(ensemble.gate_report)} candidates tried)"
        )
    else:
        if rate is not None:
            model = dataclasses.replace(model, dropout_rate=rate)
        matrix = mc_predict(model, X, passes, derive_seed(seed, 1))
        source = "dropout"

    log_path = _outpath(out_dir, "predictions.log")
    fmt.write_prediction_log(
        log_path, matrix, source=source, master_seed=seed,
        true_labels=y if with_labels else None,
    )
    manifest.add_output(log_path)
    fmt.write_manifest(_outpath(out_dir, "predict_manifest.json"), manifest)
    click.echo(f"wrote {log_path} ({matrix.num_samples} samples x {matrix.num_passes} passes)")


@main.command(name="estimate")
@click.option("--ref-log", type=click.Path(exists=True), required=True, help="Labeled reference log.")
@click.option("--new-log", type=click.Path(exists=True), required=True, help="Unlabeled new-set log.")
@click.option("--areas", type=int, default=50, show_default=True)
@click.option("--empty-policy", type=click.Choice(["zero", "nearest"]), default="zero", show_default=True)
@click.option("--clamp/--no-clamp", default=False, show_default=True, help="Clamp acc2 into [0, 1].")
@_common_options
@_handle_errors
def estimate_cmd(ref_log, new_log, areas, empty_policy, clamp, seed, out_dir):
    """Estimate new-set accuracy from a labeled reference log."""
    seed = _resolve_seed(seed)
    ref_matrix, ref_labels, _ = fmt.read_prediction_log(ref_log)
    if ref_labels is None:
        raise InvalidInputError(f"reference log {ref_log} has no true-label column")
    new_matrix, _, _ = fmt.read_prediction_log(new_log)
    cfg = EstimationConfig(num_areas=areas, empty_area_policy=empty_policy, clamp_to_unit=clamp)
    result = estimate(ref_matrix, ref_labels, new_matrix, cfg)

    manifest = fmt.RunManifest(
        command="estimate",
        seed=seed,
        config={"areas": areas, "empty_policy": empty_policy, "clamp": clamp},
    )
    manifest.add_input(ref_log)
    manifest.add_input(new_log)
    record_path = _outpath(out_dir, "estimate.jsonl")
    fmt.write_jsonl(record_path, [_result_record(result)])
    manifest.add_output(record_path)
    fmt.write_manifest(_outpath(out_dir, "estimate_manifest.json"), manifest)

    click.echo(f"estimate over {areas} areas, T={ref_matrix.num_passes} passes")
    _print_result(result)
    click.echo(f"wrote {record_path}")


@main.command(name="sweep")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--ref-data", type=click.Path(exists=True), required=True)
@click.option("--new-data", type=click.Path(exists=True), required=True)
@click.option("--areas-list", default="10,50,100,150", show_default=True)
@click.option("--rates-list", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", show_default=True)
@_common_options
@_handle_errors
def sweep_cmd(model_path, ref_data, new_data, areas_list, rates_list, seed, out_dir):
    """Estimate over a grid of area counts and dropout rates (T = areas)."""
    seed = _resolve_seed(seed)
    model = fmt.read_model(model_path)
    ref_X, ref_y = fmt.read_dataset(ref_data)
    new_X, new_y = fmt.read_dataset(new_data)
    areas = [int(a) for a in areas_list.split(",") if a]
    rates = [float(r) for r in rates_list.split(",") if r]
    cells = run_sweep(model, ref_X, ref_y, new_X, areas, rates, derive_seed(seed, 0))

    true_acc = evaluate_accuracy(model, new_X, new_y)
    records = []
    for cell in cells:
        rec = {
            "num_areas": cell.num_areas,
            "dropout_rate": cell.dropout_rate,
            "true_accuracy": true_acc,
            **_result_record(cell.result),
        }
        records.append(rec)
    manifest = fmt.RunManifest(
        command="sweep", seed=seed, config={"areas": areas, "rates": rates},
    )
    manifest.add_input(model_path)
    manifest.add_input(ref_data)
    manifest.add_input(new_data)
    record_path = _outpath(out_dir, "sweep.jsonl")
    fmt.write_jsonl(record_path, records)
    manifest.add_output(record_path)
    fmt.write_manifest(_outpath(out_dir, "sweep_manifest.json"), manifest)

    header = "areas\\rate " + " ".join(f"{r:>7.2f}" for r in rates)
    click.echo(f"|acc_new - true| per cell (true accuracy {true_acc:.4f})")
    click.echo(header)
    k = 0
    for n in areas:
        row = []
        for _ in rates:
            row.append(f"{abs(cells[k].result.acc_new - true_acc):7.4f}")
            k += 1
        click.echo(f"{n:>10d} " + " ".join(row))
    click.echo(f"wrote {record_path}")


@main.command(name="corrupt")
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--transform", type=click.Choice(sorted(corr.CORRUPTIONS)), required=True)
@click.option("--severity", type=int, required=True)
@_common_options
@_handle_errors
def corrupt_cmd(data_path, transform, severity, seed, out_dir):
    """Write a distribution-shifted copy of a dataset."""
    seed = _resolve_seed(seed)
    X, y = fmt.read_dataset(data_path)
    shifted = corr.corrupt_dataset(X, transform, severity, derive_seed(seed, 0))
    out_path = _outpath(out_dir, f"{transform}_s{severity}.npz")
    fmt.write_dataset(out_path, shifted, y)
    manifest = fmt.RunManifest(
        command="corrupt", seed=seed, config={"transform": transform, "severity": severity},
    )
    manifest.add_input(data_path)
    manifest.add_output(out_path)
    fmt.write_manifest(_outpath(out_dir, "corrupt_manifest.json"), manifest)
    click.echo(f"wrote {out_path}")


@main.command(name="baseline")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--ref-log", type=click.Path(exists=True), required=True, help="Labeled reference log.")
@click.option("--new-data", type=click.Path(exists=True), required=True, help="Labeled new set (npz).")
@click.option("--budgets", default="50:180:10", show_default=True, help="start:stop:step labeling budgets.")
@_common_options
@_handle_errors
def baseline_cmd(model_path, ref_log, new_data, budgets, seed, out_dir):
    """Random and cross-entropy selection baselines vs the estimator."""
    seed = _resolve_seed(seed)
    model = fmt.read_model(model_path)
    ref_matrix, ref_labels, _ = fmt.read_prediction_log(ref_log)
    if ref_labels is None:
        raise InvalidInputError(f"reference log {ref_log} has no true-label column")
    new_X, new_y = fmt.read_dataset(new_data)

    try:
        start, stop, step = (int(v) for v in budgets.split(":"))
    except ValueError:
        raise InvalidInputError(f"budgets must be start:stop:step, got {budgets!r}")
    budget_sizes = list(range(start, stop + 1, step))

    new_matrix = mc_predict(model, new_X, ref_matrix.num_passes, derive_seed(seed, 0))
    cfg = EstimationConfig(num_areas=ref_matrix.num_passes)
    result = estimate(ref_matrix, ref_labels, new_matrix, cfg)
    true_acc = evaluate_accuracy(model, new_X, new_y)

    rep = hidden_features(model, new_X)
    random_per_budget = {}
    ces_per_budget = {}
    for b_idx, budget in enumerate(budget_sizes):
        random_per_budget[budget] = bl.random_select_estimate(
            model, new_X, new_y, budget, derive_seed(seed, 1, b_idx)
        )
        ces_per_budget[budget] = bl.ces_select_estimate(
            model, new_X, new_y, rep, budget, seed=derive_seed(seed, 2, b_idx)
        )
    rows = bl.compare_report(
        result.acc_new, {"random": random_per_budget, "ces": ces_per_budget}, true_acc
    )

    manifest = fmt.RunManifest(
        command="baseline", seed=seed, config={"budgets": budgets},
    )
    manifest.add_input(model_path)
    manifest.add_input(ref_log)
    manifest.add_input(new_data)
    record_path = _outpath(out_dir, "baseline.jsonl")
    fmt.write_jsonl(record_path, rows)
    manifest.add_output(record_path)
    fmt.write_manifest(_outpath(out_dir, "baseline_manifest.json"), manifest)

    click.echo(f"true accuracy {true_acc:.4f}; estimator acc_new {result.acc_new:.4f}")
    click.echo("budget  random   ces      estimator")
    for row in rows:
        click.echo(
            f"{row['budget']:>6d}  {row['random_error']:.4f}   "
            f"{row['ces_error']:.4f}   {row['estimator_error']:.4f}"
        )
    click.echo(f"wrote {record_path}")


@main.command(name="replicate")
@click.option("--kind", type=click.Choice(DATASET_KINDS), default="blobs", show_default=True)
@click.option("--classes", type=int, default=3, show_default=True)
@click.option("--samples", type=int, default=5000, show_default=True)
@click.option("--noise", type=float, default=0.13, show_default=True)
@click.option("--features", "n_features", type=int, default=8, show_default=True)
@click.option("--areas", type=int, default=50, show_default=True)
@click.option("--rate", type=float, default=0.5, show_default=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--transform", type=click.Choice(sorted(corr.CORRUPTIONS)), default="gaussian_noise", show_default=True)
@_common_options
@_handle_errors
def replicate_cmd(kind, classes, samples, noise, n_features, areas, rate, epochs, transform, seed, out_dir):
    """Run the two motivating studies end to end at toy scale."""
    seed = _resolve_seed(seed)
    X, y = synth_dataset(kind, classes, samples, noise, derive_seed(seed, 0), n_features)
    cfg = TrainConfig(epochs=epochs, seed=derive_seed(seed, 1))
    model = train_sgd(X, y, cfg, dropout_rate=rate)

    holdout_X, holdout_y = synth_dataset(kind, classes, max(samples // 2, 2 * classes), noise, derive_seed(seed, 2), n_features)
    rows, _ = area_agreement_study(
        model, holdout_X, holdout_y, num_areas=areas, master_seed=derive_seed(seed, 3)
    )
    study = confidence_accuracy_study(
        model, holdout_X, holdout_y,
        corruption=transform, num_areas=areas, master_seed=derive_seed(seed, 4),
    )

    manifest = fmt.RunManifest(
        command="replicate",
        seed=seed,
        config={
            "kind": kind, "classes": classes, "samples": samples, "noise": noise,
            "n_features": n_features, "areas": areas, "rate": rate,
            "epochs": epochs, "transform": transform,
        },
    )
    areas_path = _outpath(out_dir, "replicate_areas.jsonl")
    fmt.write_jsonl(areas_path, [dataclasses.asdict(r) for r in rows])
    manifest.add_output(areas_path)
    conf_path = _outpath(out_dir, "replicate_confidence.jsonl")
    fmt.write_jsonl(
        conf_path,
        [dataclasses.asdict(p) for p in study.points]
        + [{"slope": study.slope, "intercept": study.intercept, "pearson_r": study.pearson_r}],
    )
    manifest.add_output(conf_path)
    fmt.write_manifest(_outpath(out_dir, "replicate_manifest.json"), manifest)

    populated = [r for r in rows if r.ref_size > 0 and r.new_size > 0]
    worst = max((abs(r.ref_accuracy - r.new_accuracy) for r in populated), default=float("nan"))
    click.echo(f"study 1: {len(populated)} populated areas, worst accuracy gap {worst:.4f}")
    click.echo(
        f"study 2: least-squares fit accuracy ~ {study.slope:.4f} x top_fraction "
        f"+ {study.intercept:.4f}, pearson r {study.pearson_r:.4f}"
    )
    click.echo(f"wrote {areas_path} and {conf_path}")


if __name__ == "__main__":
    main()
