import json
import os
import subprocess
import sys

import numpy as np
import pytest

from anemone import cli, graph, nn, pipeline

from conftest import random_graph


@pytest.fixture(scope="module")
def clean_graph_dir(tmp_path_factory):
    """A small clean graph on disk, shared by the CLI tests."""
    d = tmp_path_factory.mktemp("data")
    g = random_graph(70, num_nodes=120, feature_dim=8, edge_prob=0.06)
    graph.save_graph(g, d / "edges.txt", d / "features.txt")
    return d


TRAIN_FAST = [
    "--dim", "4", "--epochs", "2", "--batch-size", "64",
    "--subgraph-size", "3",
]
SCORE_FAST = ["--rounds", "4", "--subgraph-size", "3"]
FAST = TRAIN_FAST + ["--rounds", "4"]  # the run subcommand takes both sets


def run_pipeline(edges, features, out, extra=()):
    rc = cli.main(
        ["run", "--edges", str(edges), "--features", str(features),
         "--out", str(out), "--seed", "3",
         "--cliques", "2", "--clique-size", "4", "--contextual", "8",
         "--candidates", "20", *FAST, *extra]
    )
    assert rc == 0


class TestArgHandling:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0

    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flags(self, capsys):
        rc = cli.main(["train"])
        assert rc == 1
        err = capsys.readouterr().err
        assert "missing required" in err
        assert "--edges" in err and "--features" in err and "--out" in err

    def test_few_shot_without_labels(self, clean_graph_dir, tmp_path, capsys):
        rc = cli.main(
            ["train", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(tmp_path), "--few-shot", "2", *TRAIN_FAST]
        )
        assert rc == 1
        assert "--few-shot needs --labels" in capsys.readouterr().err

    def test_nonexistent_input_is_reported(self, tmp_path, capsys):
        rc = cli.main(
            ["inject", "--edges", str(tmp_path / "no.txt"),
             "--features", str(tmp_path / "no2.txt"), "--out", str(tmp_path)]
        )
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestConfigMerge:
    def test_cli_overrides_config_overrides_default(
        self, clean_graph_dir, tmp_path, capsys
    ):
        conf = tmp_path / "run.toml"
        conf.write_text(
            "dim = 4\nepochs = 3\nbatch-size = 64\nsubgraph-size = 3\n",
            encoding="utf-8",
        )
        out = tmp_path / "ws"
        rc = cli.main(
            ["train", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(out), "--config", str(conf), "--epochs", "2"]
        )
        assert rc == 0
        params = nn.load_checkpoint(out / "model.npz")
        assert params.embed_dim == 4  # from config file
        log = (out / "train_log.csv").read_text().splitlines()
        epochs_seen = {int(line.split(",")[0]) for line in log[1:]}
        assert epochs_seen == {0, 1}  # CLI --epochs 2 wins over config's 3

    def test_unknown_config_key(self, tmp_path, capsys):
        conf = tmp_path / "bad.toml"
        conf.write_text("somethingelse = 1\n", encoding="utf-8")
        rc = cli.main(
            ["train", "--edges", "e", "--features", "f", "--out", "o",
             "--config", str(conf)]
        )
        assert rc == 1
        assert "unknown keys: somethingelse" in capsys.readouterr().err

    def test_wrong_config_types(self, tmp_path, capsys):
        conf = tmp_path / "bad.toml"
        conf.write_text('alpha = "high"\n', encoding="utf-8")
        rc = cli.main(
            ["score", "--edges", "e", "--features", "f", "--out", "o",
             "--config", str(conf)]
        )
        assert rc == 1
        assert "must be float" in capsys.readouterr().err
        conf.write_text("epochs = true\n", encoding="utf-8")
        rc = cli.main(
            ["train", "--edges", "e", "--features", "f", "--out", "o",
             "--config", str(conf)]
        )
        assert rc == 1
        assert "must be int" in capsys.readouterr().err

    def test_int_promotes_to_float_key(self, tmp_path, clean_graph_dir, capsys):
        conf = tmp_path / "ok.toml"
        conf.write_text("alpha = 1\ndim = 4\nepochs = 1\nbatch-size = 64\n",
                        encoding="utf-8")
        out = tmp_path / "ws"
        rc = cli.main(
            ["train", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(out), "--config", str(conf)]
        )
        assert rc == 0


class TestStages:
    def test_inject_stage(self, clean_graph_dir, tmp_path, capsys):
        out = tmp_path / "ws"
        rc = cli.main(
            ["inject", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(out), "--seed", "5", "--cliques", "2",
             "--clique-size", "4", "--contextual", "6", "--candidates", "20"]
        )
        assert rc == 0
        for name in ("edges.txt", "features.txt", "labels.txt", "inject.json"):
            assert (out / name).exists()
        labels = graph.load_labels(out / "labels.txt")
        assert labels.sum() == 2 * 4 + 6
        manifest = json.loads((out / "inject.json").read_text())
        assert manifest["seed"] == 5
        assert len(manifest["anomaly_ids"]) == 14

    def test_train_score_eval_stages(self, clean_graph_dir, tmp_path, capsys):
        out = tmp_path / "ws"
        # Corrupt the clean graph first so eval has both classes.
        cli.main(
            ["inject", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(out), "--seed", "5", "--cliques", "2",
             "--clique-size", "4", "--contextual", "6", "--candidates", "20"]
        )
        edges, feats = str(out / "edges.txt"), str(out / "features.txt")
        rc = cli.main(
            ["train", "--edges", edges, "--features", feats,
             "--out", str(out), "--seed", "3", *TRAIN_FAST]
        )
        assert rc == 0
        assert (out / "model.npz").exists()
        log_lines = (out / "train_log.csv").read_text().splitlines()
        assert log_lines[0] == pipeline.TRAIN_LOG_HEADER
        assert len(log_lines) == 1 + 2 * 2  # epochs * ceil(120/64)

        rc = cli.main(
            ["score", "--edges", edges, "--features", feats,
             "--out", str(out), "--seed", "3", *SCORE_FAST]
        )
        assert rc == 0
        ids, cols = pipeline.read_scores_csv(out / "scores.csv")
        assert ids.tolist() == list(range(120))
        assert np.isfinite(cols["y"]).all()

        capsys.readouterr()
        rc = cli.main(
            ["eval", "--labels", str(out / "labels.txt"), "--out", str(out)]
        )
        assert rc == 0
        printed = capsys.readouterr().out.strip()
        payload = json.loads((out / "eval.json").read_text())
        assert printed == f"{payload['auc']:.6f}"
        assert payload["n_pos"] == 14
        assert payload["n_neg"] == 106
        assert (out / "roc.csv").exists()

    def test_score_without_model(self, clean_graph_dir, tmp_path, capsys):
        rc = cli.main(
            ["score", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(tmp_path), *SCORE_FAST]
        )
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_eval_without_scores(self, tmp_path, capsys):
        (tmp_path / "labels.txt").write_text("0\n1\n", encoding="utf-8")
        rc = cli.main(
            ["eval", "--labels", str(tmp_path / "labels.txt"),
             "--out", str(tmp_path)]
        )
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestRun:
    def test_run_injects_when_no_labels(self, clean_graph_dir, tmp_path, capsys):
        out = tmp_path / "ws"
        run_pipeline(
            clean_graph_dir / "edges.txt", clean_graph_dir / "features.txt", out
        )
        printed = capsys.readouterr().out.strip()
        assert (out / "data" / "labels.txt").exists()
        assert (out / "run0" / "scores.csv").exists()
        payload = json.loads((out / "eval.json").read_text())
        assert printed == f"{payload['auc']:.6f}"
        assert payload["runs"] == [payload["auc"]]
        assert 0.0 <= payload["auc"] <= 1.0

    def test_run_respects_existing_labels(self, clean_graph_dir, tmp_path, capsys):
        # Prepare labeled data via inject, then run on it directly.
        data = tmp_path / "data"
        cli.main(
            ["inject", "--edges", str(clean_graph_dir / "edges.txt"),
             "--features", str(clean_graph_dir / "features.txt"),
             "--out", str(data), "--seed", "9", "--cliques", "2",
             "--clique-size", "4", "--contextual", "6", "--candidates", "20"]
        )
        out = tmp_path / "ws"
        rc = cli.main(
            ["run", "--edges", str(data / "edges.txt"),
             "--features", str(data / "features.txt"),
             "--labels", str(data / "labels.txt"),
             "--out", str(out), "--seed", "3", *FAST]
        )
        assert rc == 0
        assert not (out / "data").exists()  # no re-injection
        assert (out / "run0" / "eval.json").exists()

    def test_run_is_deterministic(self, clean_graph_dir, tmp_path, capsys):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            run_pipeline(
                clean_graph_dir / "edges.txt",
                clean_graph_dir / "features.txt",
                out,
            )
        for rel in (
            "eval.json",
            os.path.join("run0", "scores.csv"),
            os.path.join("run0", "model.npz"),
            os.path.join("data", "labels.txt"),
        ):
            assert (a / rel).read_bytes() == (b / rel).read_bytes()


class TestProcessLevel:
    def test_module_entry_and_thread_env(self, tmp_path):
        env = dict(os.environ)
        env["ANEMONE_THREADS"] = "abc"
        proc = subprocess.run(
            [sys.executable, "-m", "anemone.cli", "--version"],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 2
        assert "ANEMONE_THREADS" in proc.stderr

        env["ANEMONE_THREADS"] = "1"
        proc = subprocess.run(
            [sys.executable, "-m", "anemone.cli", "--version"],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0
