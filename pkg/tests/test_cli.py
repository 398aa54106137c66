import json

import numpy as np
import pytest

from mixedgp.cli import main
from mixedgp.space import (
    Categorical,
    Continuous,
    DesignSpace,
    load_points,
    save_dataset,
    save_points,
    save_space,
)
from mixedgp.benchmarks import cosine_function, cosine_space
from mixedgp.doe import lhs
from mixedgp.space import Dataset


@pytest.fixture
def cosine_files(tmp_path):
    space = cosine_space()
    space_file = tmp_path / "cosine.space"
    save_space(space, space_file)
    points = lhs(space, 40, seed=0)
    y = np.array([cosine_function(w.continuous[0], w.categorical[0]) for w in points])
    data_file = tmp_path / "train.csv"
    save_dataset(Dataset(space, points, y), data_file)
    return space, space_file, data_file


def test_doe_lhs_row_count(tmp_path, cosine_files):
    space, space_file, _ = cosine_files
    out = tmp_path / "doe.csv"
    assert main(["doe", str(space_file), "--n", "98", "--seed", "3", "--out", str(out)]) == 0
    assert len(load_points(space, out)) == 98


def test_doe_grid_row_count(tmp_path, cosine_files):
    space, space_file, _ = cosine_files
    out = tmp_path / "grid.csv"
    code = main(["doe", str(space_file), "--method", "grid", "--grid-counts", "1000",
                 "--out", str(out)])
    assert code == 0
    assert len(load_points(space, out)) == 13000


def test_doe_missing_space_file(tmp_path):
    code = main(["doe", str(tmp_path / "nope.space"), "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_doe_overflowing_grid(tmp_path):
    space = DesignSpace((Continuous("a", 0, 1), Continuous("b", 0, 1), Continuous("c", 0, 1)))
    space_file = tmp_path / "big.space"
    save_space(space, space_file)
    code = main(["doe", str(space_file), "--method", "grid",
                 "--grid-counts", "1000,1000,1000", "--out", str(tmp_path / "x.csv")])
    assert code == 3


def test_fit_predict_roundtrip(tmp_path, cosine_files, capsys):
    space, space_file, data_file = cosine_files
    model_file = tmp_path / "model.json"
    trace_file = tmp_path / "trace.csv"
    code = main([
        "fit", str(space_file), str(data_file), "--kernel", "gd", "--starts", "2",
        "--budget", "400", "--seed", "0", "--trace", str(trace_file),
        "--out-model", str(model_file),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "kernel=gd" in out and "n_hyper=2" in out
    assert model_file.exists() and trace_file.exists()
    doc = json.loads(model_file.read_text())
    assert doc["kernel"] == "gd" and len(doc["theta_flat"]) == 2

    # predicting the training file reproduces the targets
    pred_file = tmp_path / "preds.csv"
    assert main(["predict", str(model_file), str(data_file), "--out", str(pred_file)]) == 0
    lines = pred_file.read_text().strip().splitlines()
    assert lines[0].endswith("mean,stddev")
    rows = [line.split(",") for line in lines[1:]]
    data_rows = [line.split(",") for line in data_file.read_text().strip().splitlines()[1:]]
    for row, data_row in zip(rows, data_rows):
        assert abs(float(row[-2]) - float(data_row[-1])) <= 1e-6 * (1 + abs(float(data_row[-1])))
        assert float(row[-1]) >= 0.0


def test_fit_multistart_monotone(tmp_path, cosine_files, capsys):
    space, space_file, data_file = cosine_files

    def run(starts):
        model_file = tmp_path / f"m{starts}.json"
        assert main(["fit", str(space_file), str(data_file), "--kernel", "gd",
                     "--starts", str(starts), "--budget", "400",
                     "--out-model", str(model_file)]) == 0
        return json.loads(model_file.read_text())["log_likelihood"]

    ll1, ll10 = run(1), run(10)
    assert ll10 >= ll1 - 1e-9


def test_predict_empty_points_file(tmp_path, cosine_files):
    space, space_file, data_file = cosine_files
    model_file = tmp_path / "model.json"
    assert main(["fit", str(space_file), str(data_file), "--kernel", "gd", "--starts", "1",
                 "--budget", "200", "--out-model", str(model_file)]) == 0
    empty = tmp_path / "empty.csv"
    save_points(space, (), empty)
    out = tmp_path / "preds.csv"
    assert main(["predict", str(model_file), str(empty), "--out", str(out)]) == 0
    assert out.read_text().strip().splitlines() == ["x,c,mean,stddev"]


def test_fit_ehh_reports_79(tmp_path, cosine_files, capsys):
    space, space_file, data_file = cosine_files
    code = main(["fit", str(space_file), str(data_file), "--kernel", "ehh", "--starts", "1",
                 "--budget", "300", "--out-model", str(tmp_path / "m.json")])
    assert code == 0
    assert "n_hyper=79" in capsys.readouterr().out


def test_benchmark_dragon_audit(tmp_path, capsys):
    out = tmp_path / "audit.csv"
    assert main(["benchmark", "--problem", "dragon-audit", "--out", str(out)]) == 0
    assert "relaxed=21 gd=12 cr=21 ehh=47" in capsys.readouterr().out
    assert "relaxed_total,21" in out.read_text()


def test_benchmark_cosine_rows(tmp_path):
    out = tmp_path / "report.csv"
    code = main(["benchmark", "--problem", "cosine", "--kernels", "gd,cr",
                 "--doe-size", "6", "--seed", "0", "--starts", "1", "--budget", "150",
                 "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("gd,") and lines[2].startswith("cr,")


def test_benchmark_unknown_problem():
    with pytest.raises(SystemExit) as info:
        main(["benchmark", "--problem", "rosenbrock"])
    assert info.value.code == 2


def test_benchmark_unknown_kernel_kind():
    code = main(["benchmark", "--problem", "cosine", "--kernels", "matern",
                 "--doe-size", "5", "--starts", "1", "--budget", "50"])
    assert code == 2


def test_kernel_info(tmp_path, cosine_files, capsys):
    _, space_file, _ = cosine_files
    assert main(["kernel-info", str(space_file)]) == 0
    out = capsys.readouterr().out
    assert "gd: 2 hyperparameters" in out
    assert "ehh: 79 hyperparameters" in out
    assert "fe: 92 hyperparameters" in out


def test_export_corr_gd_single_value(tmp_path, cosine_files):
    space, space_file, data_file = cosine_files
    model_file = tmp_path / "model.json"
    assert main(["fit", str(space_file), str(data_file), "--kernel", "gd", "--starts", "2",
                 "--budget", "400", "--out-model", str(model_file)]) == 0
    out = tmp_path / "corr.csv"
    assert main(["export-corr", str(model_file), "--variable", "2", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].split(",") == [str(i) for i in range(1, 14)]
    matrix = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.all(np.diag(matrix) == 1.0)
    off = matrix[~np.eye(13, dtype=bool)]
    assert np.unique(off).size == 1


def test_export_corr_rejects_continuous_variable(tmp_path, cosine_files):
    space, space_file, data_file = cosine_files
    model_file = tmp_path / "model.json"
    assert main(["fit", str(space_file), str(data_file), "--kernel", "gd", "--starts", "1",
                 "--budget", "200", "--out-model", str(model_file)]) == 0
    code = main(["export-corr", str(model_file), "--variable", "1",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 5


def test_seed_env_override(tmp_path, cosine_files, monkeypatch):
    space, space_file, _ = cosine_files
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("MIXEDGP_SEED", "11")
    assert main(["doe", str(space_file), "--n", "9", "--out", str(out1)]) == 0
    monkeypatch.delenv("MIXEDGP_SEED")
    assert main(["doe", str(space_file), "--n", "9", "--seed", "11", "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
