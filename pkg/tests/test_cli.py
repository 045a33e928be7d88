import json

import numpy as np
import pytest

from drivestyle.cli import main
from drivestyle.experiment import (
    ExperimentConfig,
    ClassifierConfig,
    load_config,
    run_experiment,
)
from drivestyle.learners import SplitPlan
from drivestyle.sensor import load_segments


@pytest.fixture
def corpus(tmp_path):
    path = tmp_path / "turn.csv"
    assert main(["synth", "--kind", "turn", "--n", "15", "--seed", "2", "--out", str(path)]) == 0
    return path


def test_synth_writes_segments(corpus):
    segs = load_segments(corpus)
    assert len(segs) == 30 and {s.kind.value for s in segs} == {"turn"}


def test_extract_select_train(tmp_path, corpus):
    feats, weights, model = tmp_path / "f.csv", tmp_path / "w.json", tmp_path / "m.json"
    assert main(["extract", "--input", str(corpus), "--out", str(feats), "--json", str(tmp_path / "f.json")]) == 0
    assert main(["select", "--features", str(feats), "--out", str(weights)]) == 0
    doc = json.loads(weights.read_text())
    assert len(doc["weights"]) == 22
    assert doc["selected"] == [i + 1 for i, w in enumerate(doc["weights"]) if w > 0.1]
    for alg in ("mlp", "rbf", "svm"):
        assert main(["train", "--features", str(feats), "--weights", str(weights), "--algorithm", alg,
                     "--out", str(model)]) == 0
        m = json.loads(model.read_text())
        assert m["algorithm"] == alg and m["columns"] == (doc["selected"] or list(range(1, 23)))


def test_extract_gaussian_source(tmp_path, corpus):
    out = tmp_path / "g.csv"
    code = main(["extract", "--input", str(corpus), "--out", str(out), "--source", "gaussian6"])
    assert code in (0, 3)
    assert out.read_text().splitlines()[0] == "segment_id,label,f01,f02,f03,f04,f05,f06"


def test_rule_and_fit(tmp_path, capsys):
    brake = tmp_path / "b.csv"
    main(["synth", "--kind", "brake", "--n", "3", "--seed", "1", "--out", str(brake)])
    assert main(["rule", "--input", str(brake), "--out", str(tmp_path / "r.json")]) == 0
    verdicts = json.loads((tmp_path / "r.json").read_text())
    assert len(verdicts) == 6
    assert all(v["severity"] == "dangerous" for v in verdicts if v["label"] == "dangerous")
    lane = tmp_path / "l.csv"
    main(["synth", "--kind", "lane_change", "--n", "2", "--seed", "1", "--out", str(lane)])
    code = main(["fit", "--input", str(lane), "--out", str(tmp_path / "g.json")])
    fits = json.loads((tmp_path / "g.json").read_text())
    assert code in (0, 3) and len(fits) == 4
    assert set(fits[0]) >= {"a1", "b1", "c1", "a2", "b2", "c2", "rmse"}


def test_eval_report_and_rerun(tmp_path, capsys):
    out1, out2 = tmp_path / "e1", tmp_path / "e2"
    args = ["eval", "--synth-n", "15", "--kind", "lane_change", "--algorithm", "rbf", "--repeats", "3",
            "--seed", "5", "--out-dir", str(out1)]
    assert main(args) == 0
    table = capsys.readouterr().out
    assert "2 (one neuron for each class)" in table and "True-positive rate" in table
    assert {p.name for p in out1.iterdir()} == {"config.json", "metrics.json", "table.txt", "provenance.json"}
    doc = json.loads((out1 / "metrics.json").read_text())
    assert [r["value"] for r in doc["rows"]] == [2, 4, 6]
    assert doc["selected_features"] and len(doc["weights"]) == 22
    assert main(["eval", "--config", str(out1 / "config.json"), "--out-dir", str(out2)]) == 0
    assert (out1 / "metrics.json").read_bytes() == (out2 / "metrics.json").read_bytes()
    prov = json.loads((out1 / "provenance.json").read_text())
    assert prov["config_hash"] == doc["config_hash"] and "created" in prov

    capsys.readouterr()
    assert main(["report", str(out1 / "metrics.json")]) == 0
    assert "4 (two neurons for each class)" in capsys.readouterr().out
    assert main(["report", "--compare", str(out1 / "metrics.json"), str(out2 / "metrics.json")]) == 0
    assert "Wavelet features" in capsys.readouterr().out


def test_flags_override_config(tmp_path):
    cfg = ExperimentConfig(kind="turn", synth_n_per_class=10, classifier=ClassifierConfig("svm"),
                           split=SplitPlan(repeats=2), output_dir=str(tmp_path / "a"))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    code = main(["eval", "--config", str(path), "--algorithm", "mlp", "--hidden", "3", "--sweep", "2,3",
                 "--epochs", "50", "--no-select", "--out-dir", str(tmp_path / "b")])
    assert code == 0
    saved = load_config(tmp_path / "b" / "config.json")
    assert saved.classifier.algorithm == "mlp" and saved.classifier.sweep_values == [2, 3]
    assert saved.classifier.params["epochs"] == 50
    assert saved.split.repeats == 2 and not saved.selection.enabled


def test_gaussian_source_experiment(tmp_path):
    cfg = ExperimentConfig(kind="lane_change", synth_n_per_class=12, feature_source="gaussian6",
                           classifier=ClassifierConfig("svm"), split=SplitPlan(repeats=2),
                           output_dir=str(tmp_path / "g"))
    result = run_experiment(cfg)
    assert len(result.feature_names) == 6
    assert len(result.rows) == 1


def test_exit_codes(tmp_path, caplog):
    assert main(["extract", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x.csv")]) == 4
    bad = tmp_path / "short.csv"
    bad.write_text("segment_id,kind,label,t,ax,ay,az,gx,gy,gz\na,turn,safe,0,0,0,0,0,0,0\n")
    assert main(["extract", "--input", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    assert "sensor.TooShortSegment" in caplog.text
    assert main(["eval", "--synth-n", "5", "--features", str(bad), "--out-dir", str(tmp_path / "o")]) == 2
    feats = tmp_path / "f.csv"
    main(["synth", "--kind", "turn", "--n", "10", "--out", str(tmp_path / "t.csv")])
    main(["extract", "--input", str(tmp_path / "t.csv"), "--out", str(feats)])
    assert main(["select", "--features", str(feats), "--out", str(tmp_path / "w.json"), "--max-iters", "1"]) == 3


def test_config_hash_ignores_output_dir():
    a = ExperimentConfig(synth_n_per_class=5, output_dir="x")
    b = ExperimentConfig(synth_n_per_class=5, output_dir="y")
    c = ExperimentConfig(synth_n_per_class=6, output_dir="x")
    assert a.config_hash() == b.config_hash() != c.config_hash()
    assert ExperimentConfig.from_dict(a.to_dict()) == a


def test_validation():
    with pytest.raises(ValueError):
        ExperimentConfig().validate()
    with pytest.raises(ValueError):
        ExperimentConfig(synth_n_per_class=5, feature_source="fft").validate()
    with pytest.raises(ValueError):
        ExperimentConfig(synth_n_per_class=5, classifier=ClassifierConfig("knn")).validate()
    np.testing.assert_equal(ExperimentConfig(synth_n_per_class=5).classifier.sweep()[1], [2, 3, 4, 5, 6])
