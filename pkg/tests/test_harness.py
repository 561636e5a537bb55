import json
import os
import shutil
import subprocess
import sys

import pytest

from treelcs import errors, run_experiment, summarize
from treelcs.harness import ExperimentConfig, load_expectations


def fresh(tmp_path, name):
    d = tmp_path / name
    shutil.rmtree(d, ignore_errors=True)
    return str(d)


BASE = dict(scenario="main_theorem", law={"kind": "geometric_half"},
            master_seed=424242, n_list=[16, 32], samples=24,
            options={"c_samples": 1500})


def test_config_validation(tmp_path):
    with pytest.raises(errors.ConfigError):
        ExperimentConfig.from_dict({"scenario": "main_theorem"})
    with pytest.raises(errors.ConfigError):
        ExperimentConfig.from_dict(dict(BASE, out_dir="x", bogus=1))
    cfg = ExperimentConfig.from_dict(dict(BASE, out_dir="x"))
    cfg.scenario = "nope"
    with pytest.raises(errors.ConfigError):
        cfg.validate()
    cfg = ExperimentConfig.from_dict(dict(BASE, out_dir="x",
                                          law={"kind": "binary_half"},
                                          n_list=[4]))
    with pytest.raises(errors.ConfigError):
        cfg.validate()  # binary gcd 2 does not support n = 4
    cfg = ExperimentConfig.from_dict(dict(BASE, out_dir="x",
                                          law={"kind": "d_ary", "d": 1}))
    with pytest.raises(errors.ConfigError):
        cfg.validate()


def test_empty_run_and_summarize(tmp_path):
    out = fresh(tmp_path, "empty")
    run_experiment(dict(BASE, out_dir=out, samples=0))
    assert os.path.exists(os.path.join(out, "manifest.json"))
    text, ok = summarize(out)
    assert ok  # no failing rows in an empty run
    assert "main_theorem" in text


def test_missing_manifest(tmp_path):
    out = fresh(tmp_path, "nomanifest")
    os.makedirs(out)
    with pytest.raises(errors.MissingManifest):
        summarize(out)


def test_rerun_is_byte_identical(tmp_path):
    out1 = fresh(tmp_path, "r1")
    out2 = fresh(tmp_path, "r2")
    m1 = run_experiment(dict(BASE, out_dir=out1))
    m2 = run_experiment(dict(BASE, out_dir=out2))
    assert m1.files == m2.files
    for name in m1.files:
        with open(os.path.join(out1, name)) as f:
            a = f.read()
        with open(os.path.join(out2, name)) as f:
            b = f.read()
        assert a == b
    # reports are byte-identical too
    assert summarize(out1)[0] == summarize(out2)[0]


def test_worker_count_never_changes_output(tmp_path):
    outs = {}
    for w in (1, 3):
        out = fresh(tmp_path, f"w{w}")
        os.environ["TREELCS_WORKERS"] = str(w)
        try:
            run_experiment(dict(BASE, out_dir=out))
        finally:
            del os.environ["TREELCS_WORKERS"]
        outs[w] = out
    for name in ("pairs.csv", "summary.csv", "checks.csv"):
        texts = {w: open(os.path.join(d, name)).read()
                 for w, d in outs.items()}
        assert texts[1] == texts[3]


def test_tamper_detection(tmp_path):
    out = fresh(tmp_path, "tamper")
    run_experiment(dict(BASE, out_dir=out))
    with open(os.path.join(out, "pairs.csv"), "a") as f:
        f.write("tampered\n")
    with pytest.raises(errors.TreeLcsError):
        summarize(out)


def test_failing_threshold_flagged(tmp_path):
    # at n = 16/32 the scaling law has not converged: checks must FAIL
    out = fresh(tmp_path, "fail")
    run_experiment(dict(BASE, out_dir=out))
    text, ok = summarize(out)
    assert not ok and "FAIL" in text


def test_scenarios_smoke(tmp_path):
    runs = [
        dict(scenario="sampler_validation", law={"kind": "binary_half"},
             n_list=[1, 3, 5], samples=20000),
        dict(scenario="lcs_oracle", law={"kind": "geometric_half"},
             options={"max_exhaustive": 4, "n_random": 30,
                      "random_size": 7}),
        dict(scenario="rooted_tail", law={"kind": "binary_half"},
             samples=30000, options={"h_grid": [5, 10, 20]}),
        dict(scenario="height_vs_lcs", law={"kind": "binary_half"},
             samples=30000),
        dict(scenario="many_to_one", law={"kind": "binary_half"},
             n_list=[1, 2], samples=30000),
        dict(scenario="big_jumps", law={"kind": "binary_half"},
             samples=30000),
        dict(scenario="star_counterexample", law={"kind": "geometric_half"},
             samples=0,
             options={"delta": 500, "star_reps": 20, "logtail_n": 2000,
                      "logtail_trees": 10}),
    ]
    for spec in runs:
        out = fresh(tmp_path, spec["scenario"])
        cfg = dict(master_seed=7, out_dir=out)
        cfg.update(spec)
        manifest = run_experiment(cfg)
        assert manifest.files
        text, _ = summarize(out)
        assert spec["scenario"] in text


def test_cli_roundtrip(tmp_path):
    out = fresh(tmp_path, "cli")
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(dict(BASE, out_dir=out, samples=8,
                                        n_list=[8])))
    env = dict(os.environ, PYTHONPATH="src")
    r = subprocess.run([sys.executable, "-m", "treelcs.cli", "experiment",
                        "run", str(cfg_path)], capture_output=True,
                       text=True, env=env, cwd=os.path.dirname(
                           os.path.dirname(os.path.abspath(__file__))))
    assert r.returncode == 0, r.stderr
    r = subprocess.run([sys.executable, "-m", "treelcs.cli", "experiment",
                        "summarize", out], capture_output=True, text=True,
                       env=env)
    assert "main_theorem" in r.stdout
    # sample + lcs subcommands
    trees = tmp_path / "trees.txt"
    r = subprocess.run([sys.executable, "-m", "treelcs.cli", "sample",
                        "--law", "geometric_half", "--mode", "conditioned",
                        "--n", "9", "--count", "2", "--seed", "5",
                        "--out", str(trees)], capture_output=True,
                       text=True, env=env)
    assert r.returncode == 0, r.stderr
    lines = trees.read_text().strip().split("\n")
    assert len(lines) == 2 and all(len(s) == 18 for s in lines)
    a = tmp_path / "a.tree"
    b = tmp_path / "b.tree"
    a.write_text(lines[0])
    b.write_text(lines[1])
    r = subprocess.run([sys.executable, "-m", "treelcs.cli", "lcs",
                        "--mode", "unrooted", str(a), str(b)],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and int(r.stdout) >= 1


def test_expectations_loaded():
    e = load_expectations()
    assert e["version"] == 1
    assert e["lcs_tail_slope_window"] == [-2.3, -1.7]
