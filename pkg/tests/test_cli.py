import csv
import json

import numpy as np
import pytest

from qtransfer import models as m
from qtransfer.checkpoint import load_checkpoint, save_checkpoint
from qtransfer.cli import RunConfig, crossover_iteration, main
from qtransfer.data import Dataset, gen_spirals, save_feature_file
from qtransfer.errors import ConfigError
from qtransfer.presets import PRESETS, get_preset


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_train_spirals_small(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["train", "--preset", "spirals", "--iterations", "30", "--n-train", "100", "--n-test", "40",
                 "--eval-every", "10", "--out", str(out)]) == 0
    rows = _rows(out / "metrics.csv")
    assert rows[0] == ["iteration", "epoch", "train_loss", "test_accuracy"]
    assert [int(r[0]) for r in rows[1:]] == list(range(31))
    assert sum(1 for r in rows[1:] if r[2]) == 30
    assert [int(r[0]) for r in rows[1:] if r[3]] == [0, 10, 20, 30]
    printed = capsys.readouterr().out
    assert "final test accuracy" in printed and "best test accuracy" in printed
    final_train = float(printed.split("final train accuracy: ")[1].split()[0])

    # eval on the training split reproduces the trainer's number
    assert main(["eval", "--checkpoint", str(out / "model.ckpt.json"), "--preset", "spirals", "--split", "train",
                 "--out", str(out)]) == 0
    # preset n_train differs from the run; evaluate via a file instead
    train, _ = gen_spirals(n_train=100, n_test=40)
    save_feature_file(train, tmp_path / "train.csv")
    capsys.readouterr()
    assert main(["eval", "--checkpoint", str(out / "model.ckpt.json"), "--features", str(tmp_path / "train.csv"),
                 "--out", str(out)]) == 0
    assert f"accuracy: {final_train:.4f}" in capsys.readouterr().out
    report = json.loads((out / "eval.json").read_text())
    assert report["format_version"] == 1 and report["accuracy"] == pytest.approx(final_train)


def test_zero_iterations(tmp_path):
    assert main(["train", "--preset", "spirals", "--iterations", "0", "--n-train", "20", "--n-test", "10",
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "metrics.csv")
    assert len(rows) == 2 and rows[1][0] == "0" and rows[1][3]
    fresh = m.make_dressed(2, 4, 5, 2, np.random.default_rng(0))
    saved = load_checkpoint(tmp_path / "model.ckpt.json")
    assert all(np.array_equal(fresh.params()[k], v) for k, v in saved.params().items())


def test_presets():
    assert get_preset("dogs-cats") == PRESETS["dogs-cats"]
    p = get_preset("dogs-cats")
    assert (p["depth"], p["epochs"], p["batch_size"], p["learning_rate"]) == (5, 3, 8, 0.001)
    p = get_preset("ants-bees")
    assert (p["depth"], p["epochs"], p["batch_size"], p["learning_rate"], p["decay_factor"],
            p["decay_period"]) == (6, 30, 4, 0.0004, 0.1, 10)
    p = get_preset("planes-cars")
    assert (p["depth"], p["epochs"], p["batch_size"], p["learning_rate"]) == (4, 3, 8, 0.0007)
    p = get_preset("spirals")
    assert (p["n_qubits"], p["depth"], p["iterations"], p["batch_size"], p["n_train"], p["n_test"]) == \
        (4, 5, 1000, 10, 2000, 200)
    with pytest.raises(ConfigError):
        get_preset("cats-dogs")


def test_run_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(experiment="nope", iterations=1).validate()
    with pytest.raises(ConfigError):
        RunConfig(iterations=1, learning_rate=0.0).validate()
    with pytest.raises(ConfigError):
        RunConfig(iterations=1, batch_size=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(experiment="cq", iterations=1, train_features=str(tmp_path / "x"),
                  test_features=str(tmp_path / "y")).validate()
    RunConfig(iterations=1).validate()


@pytest.mark.parametrize("argv", [
    ["train", "--preset", "nope"],
    ["train", "--experiment", "spirals"],
    ["train", "--preset", "spirals", "--lr", "-1"],
    ["train", "--preset", "dogs-cats"],
])
def test_config_errors_exit_2(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_cq_train_and_width_mismatch(tmp_path):
    assert main(["gen-features", "--width", "8", "--n-train", "24", "--n-test", "12", "--seed", "1",
                 "--out", str(tmp_path)]) == 0
    run = tmp_path / "run"
    assert main(["train", "--preset", "dogs-cats", "--train-features", str(tmp_path / "train_features.csv"),
                 "--test-features", str(tmp_path / "test_features.csv"), "--out", str(run)]) == 0
    assert (run / "best.ckpt.json").is_file()
    assert load_checkpoint(run / "model.ckpt.json").bare.depth == 5
    train, _ = gen_spirals(n_train=10, n_test=2)
    save_feature_file(train, tmp_path / "two.csv")
    assert main(["eval", "--checkpoint", str(run / "model.ckpt.json"), "--features", str(tmp_path / "two.csv"),
                 "--out", str(tmp_path)]) == 2
    assert main(["decision-region", "--checkpoint", str(run / "model.ckpt.json"), "--out", str(tmp_path)]) == 2


def test_malformed_features_exit_2(tmp_path):
    (tmp_path / "bad.csv").write_text("label,f0\n0,zzz\n")
    assert main(["train", "--preset", "dogs-cats", "--train-features", str(tmp_path / "bad.csv"),
                 "--test-features", str(tmp_path / "bad.csv"), "--out", str(tmp_path)]) == 2
    (tmp_path / "ck.json").write_text("{")
    assert main(["eval", "--checkpoint", str(tmp_path / "ck.json"), "--features", str(tmp_path / "bad.csv")]) == 2


def test_constant_model_eval_and_region(tmp_path, capsys):
    model = m.make_baseline([2, 2], np.random.default_rng(0))
    model.layers[0].W[:] = 0.0
    model.layers[0].b[:] = [1.0, 0.0]
    save_checkpoint(model, tmp_path / "const.json")
    save_feature_file(Dataset(np.zeros((10, 2)), np.arange(10) % 2, 2), tmp_path / "bal.csv")
    assert main(["eval", "--checkpoint", str(tmp_path / "const.json"), "--features", str(tmp_path / "bal.csv"),
                 "--out", str(tmp_path)]) == 0
    assert "accuracy: 0.5000" in capsys.readouterr().out
    assert main(["decision-region", "--checkpoint", str(tmp_path / "const.json"), "--min", "-1", "--max", "1",
                 "--steps", "3", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "decision_region.csv")
    assert rows[0] == ["x", "y", "predicted_class"]
    pts = [(float(x), float(y)) for x, y, _ in rows[1:]]
    assert pts == [(x, y) for x in (-1.0, 0.0, 1.0) for y in (-1.0, 0.0, 1.0)]
    assert {c for _, _, c in rows[1:]} == {"0"}


def test_region_agrees_with_predict(tmp_path):
    model = m.make_dressed(2, 4, 2, 2, np.random.default_rng(3))
    save_checkpoint(model, tmp_path / "d.json")
    assert main(["decision-region", "--checkpoint", str(tmp_path / "d.json"), "--steps", "7",
                 "--out", str(tmp_path)]) == 0
    for x, y, c in _rows(tmp_path / "decision_region.csv")[1:]:
        assert m.predict(model, [float(x), float(y)]) == int(c)


def test_qc_and_qq_train(tmp_path):
    assert main(["train", "--preset", "qc", "--iterations", "50", "--out", str(tmp_path / "qc")]) == 0
    assert load_checkpoint(tmp_path / "qc" / "model.ckpt.json").extractor.depth == 3
    assert main(["train", "--preset", "qq", "--iterations", "10", "--pretrain-iterations", "10",
                 "--n-train", "30", "--n-test", "10", "--out", str(tmp_path / "qq")]) == 0
    trained = load_checkpoint(tmp_path / "qq" / "model.ckpt.json")
    source = load_checkpoint(tmp_path / "qq" / "source.ckpt.json")
    assert trained.frozen_depth == 2 and np.array_equal(trained.bare.weights[:2], source.bare.weights[:2])
    # the qq source can seed a qc run
    assert main(["train", "--preset", "qc", "--iterations", "5", "--source-checkpoint",
                 str(tmp_path / "qq" / "source.ckpt.json"), "--truncate-to", "1", "--out", str(tmp_path / "qc2")]) == 0
    assert load_checkpoint(tmp_path / "qc2" / "model.ckpt.json").extractor.depth == 1


def test_qq_compare_outputs(tmp_path):
    argv = ["qq-compare", "--iterations", "12", "--pretrain-iterations", "10", "--n-train", "24", "--n-test", "8",
            "--seeds", "3", "--seed", "4", "--out"]
    assert main(argv + [str(tmp_path / "a")]) == 0
    a = tmp_path / "a"
    tr, sc = _rows(a / "transfer.csv"), _rows(a / "scratch.csv")
    assert len(tr) == len(sc) == 14 and [r[0] for r in tr] == [r[0] for r in sc]
    summary = json.loads((a / "summary.json").read_text())
    assert summary["early_iteration"] == 3 and len(summary["per_seed"]) == 3
    early = []
    for entry in summary["per_seed"]:
        rows = _rows(a / f"transfer_seed{entry['seed']}.csv")
        srows = _rows(a / f"scratch_seed{entry['seed']}.csv")
        assert float(rows[4][2]) == entry["transfer_loss"]["3"]
        assert float(srows[4][2]) == entry["scratch_loss"]["3"]
        early.append((float(rows[4][2]), float(srows[4][2])))
    med = summary["median_early"]
    assert med["transfer_loss"] == np.median([e[0] for e in early])
    assert med["scratch_loss"] == np.median([e[1] for e in early])
    assert med["transfer_better"] == (med["transfer_loss"] < med["scratch_loss"])
    assert (a / "transfer.csv").read_bytes() == (a / "transfer_seed4.csv").read_bytes()


def test_crossover():
    assert crossover_iteration([1.0, 0.5, 0.4, 0.3], [1.0, 0.8, 0.35, 0.2]) == 2
    assert crossover_iteration([1.0, 0.5], [1.0, 0.8]) is None


def test_gen_spirals_cmd(tmp_path):
    assert main(["gen-spirals", "--n-train", "12", "--n-test", "4", "--seed", "2", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "spirals_train.csv")
    assert rows[0] == ["label", "f0", "f1"] and len(rows) == 13


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "qtransfer", "train", "--preset", "nope"], capture_output=True,
                         text=True)
    assert res.returncode == 2 and "unknown preset" in res.stderr
