"""End-to-end CLI smoke: train, simulate, replay, learn, sweep."""

import json

import pytest

from rtiac.cli import main
from rtiac.langmodel import NGramModel

CORPUS = [
    "the cat sat on the mat",
    "a dog ran to the man",
    "she can see the sea",
    "he had a hat and a bat",
] * 10


@pytest.fixture()
def model_path(tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("\n".join(CORPUS) + "\n")
    out = tmp_path / "model.json"
    rc = main(["train-model", "--corpus", str(corpus), "--order", "1",
               "--alpha", "0.1", "--out", str(out)])
    assert rc == 0
    return out


def test_train_model_writes_loadable_model(model_path, capsys):
    model = NGramModel.load(model_path)
    assert model.order == 1
    assert model.prefix_mass("the") > model.prefix_mass("ttt")


def test_simulate_then_replay_roundtrip(model_path, tmp_path, capsys):
    log = tmp_path / "session.jsonl"
    rc = main(["simulate", "--model", str(model_path), "--target", "the",
               "--sigma", "0.05", "--seed", "4", "--log", str(log)])
    out = capsys.readouterr().out
    assert rc == 0
    rec = json.loads(out)
    assert rec["completed"] is True
    assert rec["engine"] == "rtiac"

    rc = main(["replay", "--log", str(log)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "replay ok" in out


def test_learn_fits_pointer_model_from_logs(model_path, tmp_path, capsys):
    log = tmp_path / "s.jsonl"
    assert main(["simulate", "--model", str(model_path), "--target", "cat",
                 "--sigma", "0.05", "--seed", "7", "--log", str(log)]) == 0
    capsys.readouterr()
    est_path = tmp_path / "pointer.json"
    rc = main(["learn", "--logs", str(tmp_path), "--out", str(est_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "pairs" in out
    doc = json.loads(est_path.read_text())
    assert doc["feature_spec"]
    assert len(doc["A"]) == 2


def test_sweep_writes_csv(model_path, tmp_path, capsys):
    targets = tmp_path / "targets.txt"
    targets.write_text("the\ncat\n")
    out_csv = tmp_path / "out.csv"
    rc = main(["sweep", "--model", str(model_path), "--targets", str(targets),
               "--noise", "0", "--seeds", "2", "--out", str(out_csv)])
    assert rc == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0].startswith("engine,layout,sigma_u")
    assert len(lines) == 1 + 4  # 2 engines x 1 noise x 2 seeds


def test_baseline_engine_choice(model_path, capsys):
    rc = main(["simulate", "--model", str(model_path), "--target", "a",
               "--engine", "iac", "--seed", "1"])
    rec = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert rec["engine"] == "iac"
