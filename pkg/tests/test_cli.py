import shutil

import numpy as np
import pytest

import catrep as cr
from catrep import persist
from catrep.cli import main


@pytest.fixture()
def toy_csv(watermelon_path, tmp_path):
    target = tmp_path / "watermelon.csv"
    shutil.copy(watermelon_path, target)
    return target


def run(*argv):
    return main([str(a) for a in argv])


class TestFitCommand:
    def test_fit_writes_all_artifacts(self, toy_csv, tmp_path):
        out = tmp_path / "out"
        code = run("fit", toy_csv, "--label-column", "Sweetness", "--clusters", "2",
                   "--mode", "full", "--out-dir", out)
        assert code == 0
        for name in ("model.json", "embedding.csv", "trace.csv", "trace.png"):
            assert (out / name).exists()
        x = persist.read_matrix_csv(out / "embedding.csv")
        assert x.shape == (6, 252)  # 84 kernel entries over 9+... value rows

    def test_similarity_only_on_request(self, toy_csv, tmp_path):
        out = tmp_path / "out"
        run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full", "--out-dir", out)
        assert not (out / "similarity.csv").exists()
        out2 = tmp_path / "out2"
        run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full", "--out-dir", out2,
            "--write-similarity")
        s = persist.read_matrix_csv(out2 / "similarity.csv")
        assert s.shape == (6, 6)

    def test_no_plots_flag(self, toy_csv, tmp_path):
        out = tmp_path / "o"
        run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full", "--out-dir", out, "--no-plots")
        assert not (out / "trace.png").exists()

    def test_huge_delta_single_iteration(self, toy_csv, tmp_path, capsys):
        out = tmp_path / "o"
        code = run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full",
                   "--delta", "inf", "--out-dir", out)
        assert code == 0
        trace_rows = (out / "trace.csv").read_text().splitlines()
        assert sum(1 for r in trace_rows if not r.startswith("#")) == 2  # header + 1 iteration

    def test_unknown_kernel_token_is_config_error(self, toy_csv, tmp_path, capsys):
        code = run("fit", toy_csv, "--kernels", "sigmoid:1", "--out-dir", tmp_path)
        assert code == 2
        assert "catrep:" in capsys.readouterr().err

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        assert run("fit", tmp_path / "absent.csv", "--out-dir", tmp_path) == 3

    def test_ragged_csv_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\nx\n")
        assert run("fit", bad, "--out-dir", tmp_path) == 4

    def test_byte_identical_outputs_for_same_seed(self, toy_csv, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            run("fit", toy_csv, "--label-column", "Sweetness", "--clusters", "2",
                "--seed", "5", "--max-iterations", "15", "--out-dir", out, "--no-plots")
        for name in ("model.json", "embedding.csv", "trace.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_config_file_with_flag_override(self, toy_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("clusters=3\nmax-iterations=7\nmode=stochastic\n")
        out = tmp_path / "o"
        code = run("fit", toy_csv, "--label-column", "Sweetness", "--config", cfg,
                   "--clusters", "2", "--out-dir", out, "--no-plots")
        assert code == 0
        model = persist.load_model(out / "model.json")
        assert model.config["clusters"] == 2  # flag wins
        assert model.config["max_iterations"] == 7  # file wins over default

    def test_unknown_config_key_rejected(self, toy_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus=1\n")
        assert run("fit", toy_csv, "--config", cfg, "--out-dir", tmp_path) == 2


class TestTransformCommand:
    def test_transform_matches_fit_embedding(self, toy_csv, tmp_path):
        out = tmp_path / "o"
        run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full", "--out-dir", out, "--no-plots")
        emb = tmp_path / "x.csv"
        code = run("transform", out / "model.json", toy_csv, "--label-column", "Sweetness", "--out", emb)
        assert code == 0
        assert np.array_equal(persist.read_matrix_csv(emb), persist.read_matrix_csv(out / "embedding.csv"))

    def test_unseen_value_is_data_error(self, toy_csv, tmp_path, capsys):
        out = tmp_path / "o"
        run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full", "--out-dir", out, "--no-plots")
        other = tmp_path / "other.csv"
        other.write_text("Texture,Color,RootShape\nclear,purple,straight\n")
        assert run("transform", out / "model.json", other) == 4


class TestClusterCommand:
    def test_kmeans_on_embedding(self, toy_csv, tmp_path):
        out = tmp_path / "o"
        run("fit", toy_csv, "--label-column", "Sweetness", "--mode", "full", "--out-dir", out, "--no-plots")
        target = tmp_path / "assign.csv"
        code = run("cluster", "--embedding", out / "embedding.csv", "--k", "2", "--out", target)
        assert code == 0
        rows = [r for r in target.read_text().splitlines() if not r.startswith("#")]
        assert rows[0] == "object,cluster"
        assert len(rows) == 7

    def test_kmodes_on_data(self, toy_csv, tmp_path):
        target = tmp_path / "assign.csv"
        code = run("cluster", "--data", toy_csv, "--label-column", "Sweetness",
                   "--method", "kmodes", "--k", "2", "--out", target)
        assert code == 0

    def test_needs_exactly_one_source(self, toy_csv, tmp_path, capsys):
        assert run("cluster", "--k", "2") == 2
        assert run("cluster", "--embedding", "x.csv", "--data", toy_csv, "--k", "2") == 2


class TestEvaluateCommand:
    def test_perfectly_separable_reaches_full_fscore(self, tmp_path):
        data = tmp_path / "synth.csv"
        run("synth", "--objects", "90", "--attributes", "5", "--max-values", "3",
            "--clusters", "3", "--separation", "1.0", "--seed", "3", "--out", data)
        fit_out = tmp_path / "fit"
        run("fit", data, "--label-column", "label", "--clusters", "3",
            "--max-iterations", "40", "--out-dir", fit_out, "--no-plots")
        eval_out = tmp_path / "eval"
        code = run("evaluate", data, "--label-column", "label", "--model", fit_out / "model.json",
                   "--seeds", "3", "--k-list", "1,5,10", "--out-dir", eval_out, "--no-plots")
        assert code == 0
        summary = dict(
            line.split("=", 1)
            for line in (eval_out / "summary.txt").read_text().splitlines()
            if "=" in line and not line.startswith("#")
        )
        assert float(summary["fscore_kmeans_median"]) == 1.0
        precision_rows = [
            r for r in (eval_out / "precision.csv").read_text().splitlines() if not r.startswith("#")
        ]
        assert len(precision_rows) == 4  # header + 3 depths

    def test_baseline_flag_adds_kmodes_rows(self, tmp_path):
        data = tmp_path / "synth.csv"
        run("synth", "--objects", "60", "--attributes", "4", "--max-values", "3",
            "--clusters", "2", "--separation", "0.9", "--seed", "1", "--out", data)
        fit_out = tmp_path / "fit"
        run("fit", data, "--label-column", "label", "--clusters", "2",
            "--max-iterations", "25", "--out-dir", fit_out, "--no-plots")
        eval_out = tmp_path / "eval"
        run("evaluate", data, "--label-column", "label", "--model", fit_out / "model.json",
            "--seeds", "2", "--baseline-kmodes", "--out-dir", eval_out, "--no-plots")
        body = (eval_out / "fscores.csv").read_text()
        assert "kmodes" in body and "kmeans" in body

    def test_figures_rendered_by_default(self, tmp_path):
        data = tmp_path / "synth.csv"
        run("synth", "--objects", "40", "--attributes", "4", "--max-values", "3",
            "--clusters", "2", "--separation", "0.9", "--seed", "2", "--out", data)
        fit_out = tmp_path / "fit"
        run("fit", data, "--label-column", "label", "--clusters", "2",
            "--max-iterations", "20", "--out-dir", fit_out, "--no-plots")
        eval_out = tmp_path / "eval"
        run("evaluate", data, "--label-column", "label", "--model", fit_out / "model.json",
            "--seeds", "2", "--out-dir", eval_out)
        assert (eval_out / "goodness.png").exists()
        assert (eval_out / "precision.png").exists()

    def test_missing_labels_is_config_error(self, toy_csv, tmp_path, capsys):
        assert run("evaluate", toy_csv, "--embedding", "whatever.csv", "--out-dir", tmp_path) == 2


class TestSynthAndDescribe:
    def test_synth_deterministic_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for target in (a, b):
            run("synth", "--objects", "50", "--attributes", "4", "--max-values", "3",
                "--clusters", "2", "--separation", "0.7", "--seed", "9", "--out", target)
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.csv.meta").exists()

    def test_describe_key_values(self, toy_csv, capsys):
        code = run("describe", toy_csv, "--label-column", "Sweetness")
        assert code == 0
        out = capsys.readouterr().out
        assert "n_o=6" in out and "n_a=3" in out and "n_mv=4" in out

    def test_synth_bad_parameters_config_error(self, tmp_path, capsys):
        assert run("synth", "--objects", "5", "--attributes", "2", "--max-values", "2",
                   "--clusters", "9", "--separation", "0.5", "--out", tmp_path / "x.csv") == 2
