"""Command-line interface: formats, exit codes, config files, determinism."""

from __future__ import annotations

import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.random import default_rng

from depthcraft.classifier import classify, train
from depthcraft.cli import main
from depthcraft.datamodel import (GeneratorSpec, generate_two_class, load_csv,
                                  save_csv)
from depthcraft.depths.spec import DepthSpec
from depthcraft.functional import FunctionalSample, save_functional


def run(*argv):
    """Invoke main() in-process, capturing stdout and stderr."""
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = out, err
    try:
        code = main(list(argv))
    finally:
        sys.stdout, sys.stderr = old
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    td = tmp_path_factory.mktemp("cli")
    gen = GeneratorSpec(mu1=(0.0, 0.0), mu2=(3.0, 3.0))
    sample = generate_two_class(gen, 40, rng=default_rng(5))
    train_csv = td / "train.csv"
    save_csv(sample, train_csv)
    cloud_csv = td / "cloud.csv"
    save_csv(sample.data, cloud_csv)
    query = default_rng(11).standard_normal((6, 2)) * 2
    query_csv = td / "query.csv"
    np.savetxt(query_csv, query, delimiter=",")
    mean_csv = td / "mean.csv"
    np.savetxt(mean_csv, sample.data.values.mean(axis=0)[None, :],
               delimiter=",")
    return {"td": td, "sample": sample, "train": str(train_csv),
            "cloud": str(cloud_csv), "query": str(query_csv),
            "query_values": query, "mean": str(mean_csv)}


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------


def test_depth_csv_and_determinism(files):
    code, out, _ = run("depth", "--in", files["cloud"], "--query",
                       files["query"], "--notion", "mahalanobis")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "depth" and len(lines) == 7
    _, again, _ = run("depth", "--in", files["cloud"], "--query",
                      files["query"], "--notion", "mahalanobis")
    assert again == out


def test_depth_zonoid_mean_is_one(files):
    code, out, _ = run("depth", "--in", files["cloud"], "--query",
                       files["mean"], "--notion", "zonoid")
    assert code == 0
    assert float(out.splitlines()[1]) == 1.0


def test_depth_size_cap_reports_approx_hint(files, tmp_path):
    big = tmp_path / "big3.csv"
    np.savetxt(big, default_rng(0).standard_normal((100, 3)), delimiter=",")
    q3 = tmp_path / "q3.csv"
    np.savetxt(q3, np.zeros((1, 3)), delimiter=",")
    code, _, err = run("depth", "--in", str(big), "--query", str(q3),
                       "--notion", "halfspace", "--exact")
    assert code == 2
    assert "--approx" in err


def test_depth_bad_notion_exits_two(files):
    with pytest.raises(SystemExit) as excinfo:
        run("depth", "--in", files["cloud"], "--query", files["query"],
            "--notion", "nope")
    assert excinfo.value.code == 2


def test_depth_missing_file_exits_two(files, tmp_path):
    code, _, err = run("depth", "--in", str(tmp_path / "missing.csv"),
                       "--query", files["query"], "--notion", "spatial")
    assert code == 2 and "error:" in err


# ---------------------------------------------------------------------------
# ddspace
# ---------------------------------------------------------------------------


def test_ddspace_training_and_query_rows(files):
    code, out, _ = run("ddspace", "--in", files["train"], "--notion",
                       "spatial")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "C1,C2" and len(lines) == 81
    code, outq, _ = run("ddspace", "--in", files["train"], "--query",
                        files["query"], "--notion", "spatial")
    assert code == 0 and len(outq.splitlines()) == 7


# ---------------------------------------------------------------------------
# train / classify
# ---------------------------------------------------------------------------


def test_train_classify_round_trip(files, tmp_path):
    model_path = str(tmp_path / "model.json")
    code, out, _ = run("train", "--in", files["train"], "--out", model_path,
                       "--notion", "mahalanobis", "--seed", "3")
    assert code == 0
    summary = json.loads(out)
    assert summary["q"] == 2 and summary["separators"] == 1
    assert summary["n"] == 80

    code, out, _ = run("classify", "--model", model_path, "--in",
                       files["query"])
    assert code == 0
    assert out.splitlines()[0] == "label"
    cli_labels = out.splitlines()[1:]

    model = train(load_csv(files["train"]),
                  DepthSpec(notion="mahalanobis", seed=3), seed=3)
    preds = classify(model, files["query_values"])
    inproc = [p if isinstance(p, str) else model.label_names[p - 1]
              for p in preds]
    assert cli_labels == inproc


def test_train_without_out_prints_model_json(files):
    code, out, _ = run("train", "--in", files["train"], "--notion",
                       "mahalanobis", "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["format_version"] == 1 and len(doc["classes"]) == 2


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


def test_config_supplies_and_cli_overrides(files, tmp_path):
    _, want, _ = run("depth", "--in", files["cloud"], "--query",
                     files["query"], "--notion", "mahalanobis")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"in": files["cloud"], "query": files["query"],
                               "notion": "mahalanobis"}))
    code, out, _ = run("depth", "--config", str(cfg))
    assert code == 0 and out == want

    cfg.write_text(json.dumps({"in": files["cloud"], "query": files["query"],
                               "notion": "zonoid"}))
    _, out, _ = run("depth", "--config", str(cfg), "--notion", "mahalanobis")
    assert out == want


def test_config_unknown_key_exits_two(files, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus-flag": 1}))
    code, _, err = run("depth", "--config", str(cfg), "--in", files["cloud"],
                       "--query", files["query"], "--notion", "spatial")
    assert code == 2 and "bogus-flag" in err


# ---------------------------------------------------------------------------
# cv / partition
# ---------------------------------------------------------------------------


def test_cv_json_report(files):
    code, out, _ = run("cv", "--in", files["train"], "--numchunks", "5",
                       "--notion", "mahalanobis")
    assert code == 0
    rep = json.loads(out)
    assert set(rep) == {"error", "numchunks"}
    assert 0 <= rep["error"] <= 0.2


def test_partition_json_and_timing_stderr(files):
    code, out, err = run("partition", "--in", files["train"], "--size", "0.7",
                         "--times", "3", "--notion", "mahalanobis")
    assert code == 0
    rep = json.loads(out)
    assert set(rep) == {"errors", "mean", "sd"} and len(rep["errors"]) == 3
    assert "time_mean=" in err
    _, again, _ = run("partition", "--in", files["train"], "--size", "0.7",
                      "--times", "3", "--notion", "mahalanobis")
    assert again == out


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def test_bench_maxdepth_csv(files):
    code, out, _ = run("bench-maxdepth", "--df", "inf", "--n", "60", "--reps",
                       "2", "--test-size", "50", "--notions", "mahalanobis")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "depth,df,n,reps,test_size,mean_error,sd_error"
    assert len(lines) == 2


def test_bench_time_writes_csv(files, tmp_path):
    tcsv = str(tmp_path / "times.csv")
    code, out, _ = run("bench-time", "--notions", "mahalanobis", "--dims",
                       "2", "--sizes", "50", "--out", tcsv)
    assert code == 0
    assert json.loads(out) == {"cells": 1, "out": tcsv}
    with open(tcsv) as fh:
        assert fh.readline().startswith("depth,d,n,")
    _, again, _ = run("bench-time", "--notions", "mahalanobis", "--dims", "2",
                      "--sizes", "50", "--out", tcsv)
    assert again == out


# ---------------------------------------------------------------------------
# functional
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def functional_file(tmp_path_factory):
    td = tmp_path_factory.mktemp("fcli")
    rng = default_rng(2)
    obs, labels = [], []
    for i in range(30):
        t = np.sort(rng.uniform(0, 1, 12))
        t[0], t[-1] = 0.0, 1.0
        cls = 1 if i < 15 else 2
        shift = 0.0 if cls == 1 else 1.5
        obs.append((t, np.sin(2 * t) + shift + rng.normal(0, 0.05, t.size)))
        labels.append(cls)
    path = td / "fdata.json"
    save_functional(FunctionalSample(obs, labels), path)
    return {"data": str(path), "labels": labels, "td": td}


def test_ftrain_fclassify_round_trip(functional_file):
    fmodel = str(functional_file["td"] / "fmodel.json")
    code, out, _ = run("ftrain", "--in", functional_file["data"], "--out",
                       fmodel, "--classifier", "lda", "--seed", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["classifier"] == "lda"
    assert rep["num-fcn"] + rep["num-der"] >= 2

    code, out, _ = run("fclassify", "--model", fmodel, "--in",
                       functional_file["data"])
    assert code == 0
    got = out.splitlines()[1:]
    truth = [str(v) for v in functional_file["labels"]]
    assert np.mean([g == t for g, t in zip(got, truth)]) >= 0.9


def test_ftrain_fixed_pair_and_validation(functional_file):
    code, out, _ = run("ftrain", "--in", functional_file["data"], "--num-fcn",
                       "2", "--num-der", "0", "--classifier", "lda")
    assert code == 0
    rep = json.loads(out)
    assert (rep["num-fcn"], rep["num-der"]) == (2, 0)
    code, _, err = run("ftrain", "--in", functional_file["data"], "--num-fcn",
                       "2")
    assert code == 2 and "num-der" in err


# ---------------------------------------------------------------------------
# drawings
# ---------------------------------------------------------------------------


def test_contours_csv_svg_determinism(files, tmp_path):
    svg = str(tmp_path / "c.svg")
    code, out, _ = run("contours", "--in", files["cloud"], "--notion",
                       "mahalanobis", "--frequency", "40", "--levels", "5",
                       "--svg", svg)
    assert code == 0
    assert out.splitlines()[0] == "level,line,x,y"
    with open(svg) as fh:
        assert fh.read().startswith("<svg")
    _, again, _ = run("contours", "--in", files["cloud"], "--notion",
                      "mahalanobis", "--frequency", "40", "--levels", "5",
                      "--svg", svg)
    assert again == out


def test_surface_grid_csv(files):
    code, out, _ = run("surface", "--in", files["cloud"], "--notion",
                       "zonoid", "--xnum", "15", "--ynum", "15")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,y,depth" and len(lines) == 1 + 225


def test_ddplot_model_and_data_forms(files, tmp_path):
    model_path = str(tmp_path / "model.json")
    run("train", "--in", files["train"], "--out", model_path, "--notion",
        "mahalanobis", "--seed", "3")
    code, out, _ = run("ddplot", "--model", model_path)
    assert code == 0
    assert out.splitlines()[0] == "panel,index1,index2,label,d1,d2"
    assert len(out.strip().splitlines()) == 81
    code, out, _ = run("ddplot", "--in", files["train"], "--notion",
                       "spatial")
    assert code == 0 and len(out.strip().splitlines()) == 81
    code, _, _ = run("ddplot", "--in", files["train"], "--model", model_path)
    assert code == 2


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def test_generate_csv_and_seed(files, tmp_path):
    code, out, _ = run("generate", "--n-per-class", "10", "--seed", "4")
    assert code == 0
    rows = out.strip().splitlines()
    assert len(rows) == 20
    assert rows[0].endswith(",1") and rows[-1].endswith(",2")
    _, same, _ = run("generate", "--n-per-class", "10", "--seed", "4")
    assert same == out
    _, other, _ = run("generate", "--n-per-class", "10", "--seed", "5")
    assert other != out

    gcsv = tmp_path / "gen.csv"
    gcsv.write_text(out)
    loaded = load_csv(gcsv)
    assert loaded.n == 20 and loaded.q == 2


def test_generate_student_t_needs_df(files):
    code, _, _ = run("generate", "--n-per-class", "5", "--family",
                     "student-t")
    assert code == 2


# ---------------------------------------------------------------------------
# console entry point
# ---------------------------------------------------------------------------


def test_subprocess_byte_identical_stdout(files):
    env = dict(os.environ)
    cmd = [sys.executable, "-m", "depthcraft.cli", "depth", "--in",
           files["cloud"], "--query", files["query"], "--notion",
           "projection", "--seed", "9"]
    r1 = subprocess.run(cmd, capture_output=True, env=env)
    r2 = subprocess.run(cmd, capture_output=True, env=env)
    assert r1.returncode == 0
    assert r1.stdout and r1.stdout == r2.stdout
