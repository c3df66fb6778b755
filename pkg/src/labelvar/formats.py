"""File formats: prediction logs, datasets, models, run manifests.

Prediction logs are plain text with an explicit header, so logs from any
model that can emit T labels per sample can be hand-authored and fed to
the estimator.  Datasets and models round-trip through npz bit-exactly.
Every writer goes through an atomic write-temp-then-rename.

Manifests record the command, configuration, seed, and sha256 digests of
the files a run read and wrote; verifying a manifest re-hashes the files.
"""

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ParseError
from .lvr import LabelMatrix
from .mlp import MlpModel

__all__ = [
    "PREDLOG_MAGIC",
    "RunManifest",
    "write_prediction_log",
    "read_prediction_log",
    "write_dataset",
    "read_dataset",
    "write_model",
    "read_model",
    "write_ensemble_manifest",
    "write_jsonl",
    "file_digest",
    "write_manifest",
    "read_manifest",
]

PREDLOG_MAGIC = "#labelvar-predlog v1"
FORMAT_VERSION = 1


def _atomic_write_text(path, text: str):
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_bytes(path, writer):
    """``writer`` receives an open binary file handle for the temp file."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# prediction logs


def write_prediction_log(path, matrix: LabelMatrix, *, source: str, master_seed: int, true_labels=None):
    """Write a label matrix (and optionally true labels) as a text log."""
    if source not in ("dropout", "mutants"):
        raise InvalidInputError(f"source must be 'dropout' or 'mutants', got {source!r}")
    if true_labels is not None:
        true_labels = np.asarray(true_labels)
        if true_labels.shape[0] != matrix.num_samples:
            raise InvalidInputError(
                f"{matrix.num_samples} samples but {true_labels.shape[0]} true labels"
            )
        if true_labels.min() < 0 or true_labels.max() >= matrix.num_classes:
            raise InvalidInputError("true labels out of class range")
    lines = [
        PREDLOG_MAGIC,
        f"num_samples={matrix.num_samples}",
        f"num_passes={matrix.num_passes}",
        f"num_classes={matrix.num_classes}",
        f"source={source}",
        f"master_seed={master_seed}",
        f"has_true_labels={1 if true_labels is not None else 0}",
    ]
    for i in range(matrix.num_samples):
        row = " ".join(str(int(v)) for v in matrix.labels[i])
        if true_labels is not None:
            row += f" {int(true_labels[i])}"
        lines.append(row)
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_header_int(lines, lineno, key, path):
    if lineno >= len(lines):
        raise ParseError(f"missing header line '{key}='", path=path, line=lineno + 1)
    line = lines[lineno].strip()
    prefix = key + "="
    if not line.startswith(prefix):
        raise ParseError(f"expected '{key}=<int>', got {line!r}", path=path, line=lineno + 1)
    try:
        return int(line[len(prefix):])
    except ValueError:
        raise ParseError(f"'{key}' is not an integer: {line!r}", path=path, line=lineno + 1)


def read_prediction_log(path):
    """Read a prediction log; returns ``(matrix, true_labels_or_None, header)``."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != PREDLOG_MAGIC:
        raise ParseError(f"expected leading {PREDLOG_MAGIC!r}", path=path, line=1)
    num_samples = _parse_header_int(lines, 1, "num_samples", path)
    num_passes = _parse_header_int(lines, 2, "num_passes", path)
    num_classes = _parse_header_int(lines, 3, "num_classes", path)
    source_line = lines[4].strip() if len(lines) > 4 else ""
    if not source_line.startswith("source="):
        raise ParseError("expected 'source=dropout|mutants'", path=path, line=5)
    source = source_line[len("source="):]
    master_seed = _parse_header_int(lines, 5, "master_seed", path)
    has_labels = _parse_header_int(lines, 6, "has_true_labels", path)
    if has_labels not in (0, 1):
        raise ParseError("has_true_labels must be 0 or 1", path=path, line=7)

    header_rows = 7
    data_lines = lines[header_rows:]
    # tolerate one trailing blank line
    while data_lines and not data_lines[-1].strip():
        data_lines.pop()
    if len(data_lines) != num_samples:
        raise ParseError(
            f"header promises {num_samples} rows, found {len(data_lines)}",
            path=path,
            line=header_rows + len(data_lines) + 1,
        )
    expected_fields = num_passes + (1 if has_labels else 0)
    labels = np.empty((num_samples, num_passes), dtype=np.int64)
    true_labels = np.empty(num_samples, dtype=np.int64) if has_labels else None
    for i, raw in enumerate(data_lines):
        lineno = header_rows + i + 1
        fields = raw.split()
        if len(fields) != expected_fields:
            raise ParseError(
                f"expected {expected_fields} fields, got {len(fields)}", path=path, line=lineno
            )
        for j, tok in enumerate(fields):
            try:
                value = int(tok)
            except ValueError:
                raise ParseError(f"not an integer: {tok!r}", path=path, line=lineno, field=j + 1)
            if not 0 <= value < num_classes:
                raise ParseError(
                    f"label {value} out of range [0, {num_classes})",
                    path=path,
                    line=lineno,
                    field=j + 1,
                )
            if j < num_passes:
                labels[i, j] = value
            else:
                true_labels[i] = value
    matrix = LabelMatrix(labels=labels, num_classes=num_classes)
    header = {"source": source, "master_seed": master_seed}
    return matrix, true_labels, header


# ---------------------------------------------------------------------------
# datasets and models (npz)


def write_dataset(path, features, labels):
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != labels.shape[0]:
        raise InvalidInputError(f"{features.shape[0]} samples but {labels.shape[0]} labels")
    _atomic_write_bytes(
        path,
        lambda fh: np.savez(
            fh,
            format_version=np.int64(FORMAT_VERSION),
            features=features,
            labels=labels,
        ),
    )


def read_dataset(path):
    try:
        with np.load(path, allow_pickle=False) as data:
            if "features" not in data or "labels" not in data:
                raise ParseError("dataset file is missing 'features' or 'labels'", path=path)
            return data["features"], data["labels"]
    except (OSError, ValueError) as err:
        raise ParseError(f"cannot read dataset: {err}", path=path)


def write_model(path, model: MlpModel):
    arrays = {
        "format_version": np.int64(FORMAT_VERSION),
        "layer_sizes": np.asarray(model.layer_sizes, dtype=np.int64),
        "dropout_rate": np.float64(model.dropout_rate),
    }
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"weight_{l}"] = w
        arrays[f"bias_{l}"] = b
    _atomic_write_bytes(path, lambda fh: np.savez(fh, **arrays))


def read_model(path) -> MlpModel:
    try:
        with np.load(path, allow_pickle=False) as data:
            if "layer_sizes" not in data:
                raise ParseError("model file is missing 'layer_sizes'", path=path)
            sizes = tuple(int(s) for s in data["layer_sizes"])
            weights = []
            biases = []
            for l in range(len(sizes) - 1):
                if f"weight_{l}" not in data or f"bias_{l}" not in data:
                    raise ParseError(f"model file is missing layer {l} arrays", path=path)
                weights.append(data[f"weight_{l}"])
                biases.append(data[f"bias_{l}"])
            return MlpModel(
                layer_sizes=sizes,
                weights=tuple(weights),
                biases=tuple(biases),
                dropout_rate=float(data["dropout_rate"]),
            )
    except (OSError, ValueError) as err:
        raise ParseError(f"cannot read model: {err}", path=path)


# ---------------------------------------------------------------------------
# manifests and structured records


def write_ensemble_manifest(path, ensemble):
    records = [
        {
            "index": rec.index,
            "operator": rec.operator,
            "seed": rec.seed,
            "gate_accuracy": rec.gate_accuracy,
        }
        for rec in ensemble.provenance
    ]
    _atomic_write_text(path, json.dumps(records, indent=2) + "\n")


def write_jsonl(path, records):
    """Line-delimited structured records (machine output)."""
    _atomic_write_text(path, "".join(json.dumps(rec) + "\n" for rec in records))


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to re-run a command and check its files."""

    command: str
    seed: int
    config: dict
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    artifact_version: str = "0.1.0"
    format_version: int = FORMAT_VERSION

    def add_input(self, path):
        self.inputs[os.fspath(path)] = file_digest(path)

    def add_output(self, path):
        self.outputs[os.fspath(path)] = file_digest(path)


def write_manifest(path, manifest: RunManifest):
    payload = {
        "artifact_version": manifest.artifact_version,
        "format_version": manifest.format_version,
        "command": manifest.command,
        "seed": manifest.seed,
        "config": manifest.config,
        "inputs": manifest.inputs,
        "outputs": manifest.outputs,
    }
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_manifest(path, verify: bool = True) -> dict:
    """Load a manifest; with ``verify`` re-hash every referenced file."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ParseError(f"cannot read manifest: {err}", path=path)
    if verify:
        for group in ("inputs", "outputs"):
            for ref, digest in payload.get(group, {}).items():
                if not os.path.exists(ref):
                    raise InvalidInputError(f"manifest references missing file {ref}")
                actual = file_digest(ref)
                if actual != digest:
                    raise InvalidInputError(
                        f"digest mismatch for {ref}: manifest says {digest}, file is {actual}"
                    )
    return payload
