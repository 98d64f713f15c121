import csv

import numpy as np
import pytest

from dynstack.cli import main
from dynstack.simulation import generate_case
from dynstack.stacking import load_model, write_level1
from dynstack.synth import planted_homophily_network


@pytest.fixture(scope="module")
def network_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("net")
    net = planted_homophily_network(n_nodes=260, seed=5)
    net.write(root / "edges.txt", root / "labels.csv", root / "features.txt")
    return root


@pytest.fixture(scope="module")
def level1_file(tmp_path_factory):
    root = tmp_path_factory.mktemp("lvl")
    write_level1(root / "level1.csv", generate_case(3, 300, 9).to_level1())
    return root / "level1.csv"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestSimulateCommand:
    def test_report_rows_and_manifest(self, tmp_path):
        out = tmp_path / "sim"
        code = main(
            [
                "simulate", "--case", "3", "--n", "200", "--reps", "2",
                "--folds", "3", "--seed", "7", "--out", str(out),
            ]
        )
        assert code == 0
        rows = read_csv(out / "simulation_report.csv")
        assert rows[0] == ["case", "method", "mean_auc", "sd_auc", "n_reps"]
        assert len(rows) == 1 + 13  # all thirteen methods by default
        manifest = (out / "manifest.txt").read_text()
        assert "command = simulate" in manifest and "seed = 7" in manifest

    def test_rerun_byte_identical(self, tmp_path):
        args = [
            "simulate", "--case", "1", "--n", "150", "--reps", "2",
            "--folds", "3", "--seed", "3", "--raw",
        ]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        for name in ("simulation_report.csv", "simulation_raw.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_bad_case_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--case", "9", "--out", str(tmp_path)])
        assert exc.value.code == 2


class TestCentralityCommand:
    def test_path_closeness_values(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("a b\nb c\n")
        out = tmp_path / "cent"
        assert main(["centrality", "--edges", str(edges), "--kind", "closeness", "--out", str(out)]) == 0
        rows = read_csv(out / "covariate.csv")
        assert rows[0] == ["node_id", "value"]
        got = {r[0]: float(r[1]) for r in rows[1:]}
        assert got == pytest.approx({"a": 1 / 3, "b": 1 / 2, "c": 1 / 3})

    def test_degree_star(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("".join(f"hub leaf{i}\n" for i in range(5)))
        out = tmp_path / "cent"
        assert main(["centrality", "--edges", str(edges), "--kind", "degree", "--out", str(out)]) == 0
        got = {r[0]: float(r[1]) for r in read_csv(out / "covariate.csv")[1:]}
        assert got["hub"] == 5.0

    def test_takes_largest_component(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("a b\nb c\nx y\n")
        out = tmp_path / "cent"
        assert main(["centrality", "--edges", str(edges), "--kind", "closeness", "--out", str(out)]) == 0
        names = {r[0] for r in read_csv(out / "covariate.csv")[1:]}
        assert names == {"a", "b", "c"}

    def test_empty_edge_file_fails(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("")
        assert main(["centrality", "--edges", str(edges), "--out", str(tmp_path / "o")]) == 1

    def test_missing_file_fails(self, tmp_path):
        assert main(["centrality", "--edges", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o")]) == 1


class TestGraphExperimentCommand:
    def test_full_run_artifacts(self, network_files, tmp_path):
        out = tmp_path / "gx"
        code = main(
            [
                "graph-experiment",
                "--edges", str(network_files / "edges.txt"),
                "--labels", str(network_files / "labels.csv"),
                "--features", str(network_files / "features.txt"),
                "--covariate", "degree",
                "--test-fraction", "0.5",
                "--reps", "2", "--folds", "4", "--seed", "2",
                "--positive-label", "topic/positive",
                "--out", str(out),
            ]
        )
        assert code == 0
        acc = read_csv(out / "accuracy_report.csv")
        assert acc[0] == ["method", "mean_accuracy", "sd_accuracy", "n_reps"]
        assert {r[0] for r in acc[1:]} == {
            "dynamic",
            *(f"{k}_{d}" for k in ("logistic", "lasso", "ridge") for d in ("m1", "m2", "m3")),
        }
        cmp_rows = read_csv(out / "paired_comparisons.csv")
        assert cmp_rows[0] == ["method_a", "method_b", "mean_diff", "p_value"]
        assert len(cmp_rows) == 1 + 9
        curves = read_csv(out / "coefficient_curves.csv")
        assert curves[0] == ["u", "local_nb:class0", "wvrn_ica:class0"]
        assert len(curves) == 1 + 200
        assert (out / "binned_deltas.csv").exists()
        assert (out / "manifest.txt").exists()

    def test_missing_feature_file_fails_cleanly(self, network_files, tmp_path, capsys):
        code = main(
            [
                "graph-experiment",
                "--edges", str(network_files / "edges.txt"),
                "--labels", str(network_files / "labels.csv"),
                "--features", str(network_files / "missing.txt"),
                "--positive-label", "topic/positive",
                "--out", str(tmp_path / "gx"),
            ]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_disconnected_closeness_mentions_lcc_flag(self, tmp_path, capsys):
        edges = tmp_path / "edges.txt"
        edges.write_text("a b\nb c\nx y\n")
        labels = tmp_path / "labels.csv"
        labels.write_text("a,p\nb,q\nc,p\nx,q\ny,p\n")
        feats = tmp_path / "features.txt"
        feats.write_text("a w:1\nb w:1\nc w:1\nx w:1\ny w:1\n")
        with pytest.raises(SystemExit) as exc:
            main(
                [
                    "graph-experiment",
                    "--edges", str(edges), "--labels", str(labels),
                    "--features", str(feats), "--covariate", "closeness",
                    "--positive-label", "p", "--out", str(tmp_path / "gx"),
                ]
            )
        assert "--lcc" in str(exc.value)


class TestStackCommands:
    def test_fit_predict_curves_round_trip(self, level1_file, tmp_path):
        fit_out = tmp_path / "fit"
        assert main(
            [
                "stack-fit", "--level1", str(level1_file), "--model", "dynamic",
                "--lam", "1.0", "--out", str(fit_out),
            ]
        ) == 0
        model = load_model(fit_out / "model.txt")
        assert model.lam == 1.0

        pred_out = tmp_path / "pred"
        assert main(
            [
                "stack-predict", "--model", str(fit_out / "model.txt"),
                "--data", str(level1_file), "--out", str(pred_out),
            ]
        ) == 0
        rows = read_csv(pred_out / "predictions.csv")
        assert rows[0] == ["row", "probability"]
        probs = np.array([float(r[1]) for r in rows[1:]])
        assert len(probs) == 300 and np.all((probs > 0) & (probs < 1))

        cur_out = tmp_path / "cur"
        assert main(
            [
                "curves", "--model", str(fit_out / "model.txt"),
                "--points", "50", "--out", str(cur_out),
            ]
        ) == 0
        cur = read_csv(cur_out / "curves.csv")
        assert cur[0] == ["u", "z1", "z2"] and len(cur) == 51

    def test_fit_with_cv_writes_report(self, level1_file, tmp_path):
        out = tmp_path / "fitcv"
        assert main(
            [
                "stack-fit", "--level1", str(level1_file), "--model", "m2",
                "--penalty", "ridge", "--folds", "4", "--out", str(out),
            ]
        ) == 0
        rows = read_csv(out / "cv_report.csv")
        assert rows[0] == ["penalty_strength", "heldout_nll"]
        assert len(rows) == 1 + 21  # default grid size
        model = load_model(out / "model.txt")
        assert model.penalty == "ridge" and model.strength > 0

    def test_curves_on_static_model_fails(self, level1_file, tmp_path):
        out = tmp_path / "fitstat"
        assert main(
            [
                "stack-fit", "--level1", str(level1_file), "--model", "m1",
                "--penalty", "none", "--out", str(out),
            ]
        ) == 0
        with pytest.raises(SystemExit, match="dynamic"):
            main(["curves", "--model", str(out / "model.txt"), "--out", str(tmp_path / "c")])
