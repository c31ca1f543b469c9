import json
import math

import pytest

import chronoqa


def test_text_and_metrics():
    assert chronoqa.extract_years("What position did Barack Hussein Obama hold in 2010?") == [2010]
    assert chronoqa.parse_range("since 2009") == (2009, None)
    assert chronoqa.parse_range("no dates here") is None
    assert chronoqa.token_f1("University Hall", "St Andrews University") == 0.4
    assert chronoqa.exact_match("lord advocate", "Lord Advocate") == 1


def test_losses():
    assert chronoqa.triplet_margin_loss([0, 0], [3, 4], [0, 1]) == pytest.approx(5.0, abs=1e-12)
    assert chronoqa.cross_entropy([0.0, 0.0], 0) == pytest.approx(math.log(2.0))
    assert chronoqa.combined_loss(2.0, 1.0, 0.4) == pytest.approx(2.7)
    assert chronoqa.forgetting([50.66, 49.52, 47.77, 47.64, 45.29]) == pytest.approx(5.37)
    with pytest.raises(chronoqa.ValidationError):
        chronoqa.cross_entropy([0.0], 3)


def test_config():
    cfg = chronoqa.default_config()
    assert cfg["arm"] == "full"
    assert chronoqa.config_hash(cfg) == chronoqa.config_hash({})
    with pytest.raises(chronoqa.ValidationError):
        chronoqa.config_hash({"no_such_key": 1})


def test_gradcheck():
    passed, err = chronoqa.gradcheck(instances=20)
    assert passed and err < 1e-4
    assert not chronoqa.gradcheck(instances=20, inject_sign_flip=True)[0]


def test_pipeline(tmp_path):
    cfg = {"n_contexts": 60, "n_questions": 250, "epochs": 1, "dim": 8, "lr": 0.01}
    chronoqa.build(tmp_path / "data", cfg)
    assert (tmp_path / "data" / "questions.jsonl").exists()
    run = chronoqa.train(tmp_path / "data", tmp_path / "runs", cfg)
    rows = chronoqa.evaluate(f"{run}/stage_5/checkpoint", tmp_path / "data", cfg, "dev")
    assert [r["subset"] for r in rows] == [1, 2, 3, 4, 5]
    assert all(0.0 <= r["f1"] <= 100.0 for r in rows)
    text = chronoqa.report([run, run])
    assert "+0.00" in text
    meta = json.loads(open(f"{run}/run.json").read())
    assert meta["arm"] == "full"
