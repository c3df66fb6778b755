import json
import os

import numpy as np
import numpy.testing as npt
import pytest

import labelvar as lv
from labelvar.errors import InvalidInputError, ParseError
from labelvar.formats import (
    RunManifest,
    file_digest,
    read_dataset,
    read_manifest,
    read_model,
    read_prediction_log,
    write_dataset,
    write_ensemble_manifest,
    write_jsonl,
    write_manifest,
    write_model,
    write_prediction_log,
)
from labelvar.lvr import LabelMatrix
from labelvar.mlp import init_model
from labelvar.mutation import MutationConfig, generate_mutants


@pytest.fixture
def matrix():
    rng = np.random.default_rng(1)
    return LabelMatrix(labels=rng.integers(0, 4, size=(25, 6)), num_classes=4)


class TestPredictionLog:
    def test_round_trip_with_labels(self, tmp_path, matrix):
        true = np.random.default_rng(2).integers(0, 4, size=25)
        path = tmp_path / "pred.log"
        write_prediction_log(path, matrix, source="dropout", master_seed=42, true_labels=true)
        back, back_true, header = read_prediction_log(path)
        npt.assert_array_equal(back.labels, matrix.labels)
        assert back.num_classes == matrix.num_classes
        npt.assert_array_equal(back_true, true)
        assert header == {"source": "dropout", "master_seed": 42}

    def test_round_trip_without_labels(self, tmp_path, matrix):
        path = tmp_path / "pred.log"
        write_prediction_log(path, matrix, source="mutants", master_seed=7)
        back, back_true, header = read_prediction_log(path)
        npt.assert_array_equal(back.labels, matrix.labels)
        assert back_true is None
        assert header["source"] == "mutants"

    def test_write_read_write_is_stable(self, tmp_path, matrix):
        a = tmp_path / "a.log"
        b = tmp_path / "b.log"
        write_prediction_log(a, matrix, source="dropout", master_seed=1)
        back, _, _ = read_prediction_log(a)
        write_prediction_log(b, back, source="dropout", master_seed=1)
        assert a.read_bytes() == b.read_bytes()

    def test_truncated_row_names_the_line(self, tmp_path, matrix):
        path = tmp_path / "pred.log"
        write_prediction_log(path, matrix, source="dropout", master_seed=1)
        lines = path.read_text().splitlines()
        lines[9] = " ".join(lines[9].split()[:-1])  # drop a field from row 3
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as err:
            read_prediction_log(path)
        assert err.value.line == 10
        assert "fields" in str(err.value)

    def test_out_of_range_label_names_line_and_field(self, tmp_path, matrix):
        path = tmp_path / "pred.log"
        write_prediction_log(path, matrix, source="dropout", master_seed=1)
        lines = path.read_text().splitlines()
        fields = lines[8].split()
        fields[2] = "4"  # num_classes is 4, so label 4 is out of range
        lines[8] = " ".join(fields)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as err:
            read_prediction_log(path)
        assert err.value.line == 9 and err.value.field == 3
        assert "out of range" in str(err.value)

    def test_non_integer_field_rejected(self, tmp_path, matrix):
        path = tmp_path / "pred.log"
        write_prediction_log(path, matrix, source="dropout", master_seed=1)
        text = path.read_text().replace("\n0 ", "\nx ", 1)
        path.write_text(text)
        with pytest.raises(ParseError):
            read_prediction_log(path)

    def test_row_count_mismatch_rejected(self, tmp_path, matrix):
        path = tmp_path / "pred.log"
        write_prediction_log(path, matrix, source="dropout", master_seed=1)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-3]) + "\n")
        with pytest.raises(ParseError) as err:
            read_prediction_log(path)
        assert "rows" in str(err.value)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "pred.log"
        path.write_text("not a log\n")
        with pytest.raises(ParseError) as err:
            read_prediction_log(path)
        assert err.value.line == 1

    def test_bad_source_on_write_rejected(self, tmp_path, matrix):
        with pytest.raises(InvalidInputError):
            write_prediction_log(tmp_path / "x.log", matrix, source="oracle", master_seed=0)

    def test_no_stray_temp_files(self, tmp_path, matrix):
        write_prediction_log(tmp_path / "p.log", matrix, source="dropout", master_seed=0)
        assert [p.name for p in tmp_path.iterdir()] == ["p.log"]


class TestDatasetAndModel:
    def test_dataset_round_trip_bit_exact(self, tmp_path):
        X = np.random.default_rng(3).standard_normal((30, 5))
        y = np.random.default_rng(4).integers(0, 3, size=30)
        path = tmp_path / "d.npz"
        write_dataset(path, X, y)
        X2, y2 = read_dataset(path)
        npt.assert_array_equal(X, X2)
        npt.assert_array_equal(y, y2)

    def test_model_round_trip_bit_exact(self, tmp_path):
        model = init_model((7, 16, 9, 3), 0.35, seed=11)
        path = tmp_path / "m.npz"
        write_model(path, model)
        back = read_model(path)
        assert back.layer_sizes == model.layer_sizes
        assert back.dropout_rate == model.dropout_rate
        for a, b in zip(model.weights, back.weights):
            npt.assert_array_equal(a, b)
        for a, b in zip(model.biases, back.biases):
            npt.assert_array_equal(a, b)

    def test_unreadable_files_rejected(self, tmp_path):
        bad = tmp_path / "bad.npz"
        bad.write_bytes(b"garbage")
        with pytest.raises(ParseError):
            read_dataset(bad)
        with pytest.raises(ParseError):
            read_model(bad)

    def test_dataset_length_mismatch_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_dataset(tmp_path / "d.npz", np.zeros((3, 2)), np.zeros(2, np.int64))


class TestManifest:
    def test_round_trip_and_verify(self, tmp_path):
        data = tmp_path / "input.txt"
        data.write_text("hello")
        manifest = RunManifest(command="estimate", seed=3, config={"areas": 50})
        manifest.add_input(data)
        out = tmp_path / "out.txt"
        out.write_text("result")
        manifest.add_output(out)
        mpath = tmp_path / "manifest.json"
        write_manifest(mpath, manifest)
        payload = read_manifest(mpath, verify=True)
        assert payload["command"] == "estimate"
        assert payload["seed"] == 3
        assert payload["config"] == {"areas": 50}
        assert payload["inputs"][str(data)].startswith("sha256:")

    def test_tampered_file_fails_verification(self, tmp_path):
        data = tmp_path / "input.txt"
        data.write_text("hello")
        manifest = RunManifest(command="train", seed=0, config={})
        manifest.add_input(data)
        mpath = tmp_path / "manifest.json"
        write_manifest(mpath, manifest)
        data.write_text("tampered")
        with pytest.raises(InvalidInputError, match="digest mismatch"):
            read_manifest(mpath, verify=True)
        # unverified read still works
        assert read_manifest(mpath, verify=False)["command"] == "train"

    def test_missing_file_fails_verification(self, tmp_path):
        data = tmp_path / "input.txt"
        data.write_text("hello")
        manifest = RunManifest(command="train", seed=0, config={})
        manifest.add_input(data)
        mpath = tmp_path / "manifest.json"
        write_manifest(mpath, manifest)
        os.unlink(data)
        with pytest.raises(InvalidInputError, match="missing file"):
            read_manifest(mpath, verify=True)

    def test_digest_is_content_addressed(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        a.write_text("same")
        b.write_text("same")
        assert file_digest(a) == file_digest(b)


class TestStructuredRecords:
    def test_jsonl_lines_parse_back(self, tmp_path):
        path = tmp_path / "rows.jsonl"
        rows = [{"a": 1, "b": 0.5}, {"a": 2, "b": 0.25}]
        write_jsonl(path, rows)
        parsed = [json.loads(line) for line in path.read_text().splitlines()]
        assert parsed == rows

    def test_ensemble_manifest_lists_provenance(self, tmp_path, small_model):
        model, X, y = small_model
        ensemble = generate_mutants(
            model, X, y, MutationConfig(mutation_ratio=0.05, num_mutants=3, seed=1)
        )
        path = tmp_path / "ensemble.json"
        write_ensemble_manifest(path, ensemble)
        records = json.loads(path.read_text())
        assert len(records) == 3
        assert all(
            set(rec) == {"index", "operator", "seed", "gate_accuracy"} for rec in records
        )
