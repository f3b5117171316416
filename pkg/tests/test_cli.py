import itertools
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from rhtp.bench.cli import main
from rhtp.bench.presets import K_SWEEP
from rhtp.matio import write_matrix


def enumerate_delta(phi, s):
    worst = 0.0
    for S in itertools.combinations(range(phi.shape[1]), s):
        A = phi[:, S]
        eig = np.linalg.eigvalsh(A.T @ A)
        worst = max(worst, eig[-1] - 1, 1 - eig[0])
    return worst


def test_ric_matches_enumeration(tmp_path, capsys):
    phi = np.random.default_rng(0).standard_normal((5, 9)) / np.sqrt(5)
    write_matrix(tmp_path / "tiny.mat", phi)
    assert main(["ric", "--matrix", str(tmp_path / "tiny.mat"), "--order", "2"]) == 0
    out = capsys.readouterr().out
    value = float(re.search(r"delta_2 = (\S+)", out).group(1))
    assert value == pytest.approx(enumerate_delta(phi, 2), rel=1e-12)
    assert "exact" in out


def test_ric_randomized(tmp_path, capsys):
    phi = np.random.default_rng(1).standard_normal((5, 9))
    write_matrix(tmp_path / "tiny.mat", phi)
    args = ["ric", "--matrix", str(tmp_path / "tiny.mat"), "--order", "3", "--mode", "randomized", "--samples", "20"]
    assert main(args) == 0
    assert "lower bound" in capsys.readouterr().out


def test_ric_over_budget_is_runtime_error(tmp_path, capsys):
    write_matrix(tmp_path / "big.mat", np.random.default_rng(2).standard_normal((10, 60)))
    assert main(["ric", "--matrix", str(tmp_path / "big.mat"), "--order", "10"]) == 2
    assert "BudgetError" in capsys.readouterr().err


def test_missing_config(tmp_path, capsys):
    path = str(tmp_path / "missing.file")
    assert main(["run", "--config", path]) == 1
    assert path in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["run", "--config", "x.json", "--frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err


def test_no_command(capsys):
    assert main([]) == 1


def test_preset_output(capsys):
    assert main(["preset", "paper-fig2"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["n"] == 512 and cfg["m"] == [256] and cfg["K"] == K_SWEEP
    assert cfg["num_trials"] == 100 and cfg["success_tol"] == 1e-6


def test_preset_overrides(tmp_path):
    out = tmp_path / "p.json"
    assert main(["preset", "paper-msd", "--output", str(out), "--num_trials", "2", "--K", "5,7"]) == 0
    cfg = json.loads(out.read_text())
    assert cfg["num_trials"] == 2 and cfg["K"] == [5, 7]


def small_run(tmp_path, *extra):
    cfg = tmp_path / "c.json"
    assert main(["preset", "paper-msd", "--output", str(cfg)]) == 0
    out = tmp_path / "out"
    args = ["run", "--config", str(cfg), "--n", "12", "--m", "8", "--K", "2", "--num_trials", "2",
            "--output_dir", str(out), *extra]
    assert main(args) == 0
    return out


def test_run_and_report(tmp_path, capsys):
    out = small_run(tmp_path)
    assert (out / "results.csv").exists()
    merged = tmp_path / "merged"
    assert main(["report", str(out), "--output", str(merged)]) == 0
    lines = (merged / "combined.csv").read_text().splitlines()
    assert len(lines) == 6
    assert main(["report", str(tmp_path / "nothing"), "--output", str(merged)]) == 1


def test_run_rejects_bad_override(tmp_path):
    cfg = tmp_path / "c.json"
    main(["preset", "paper-msd", "--output", str(cfg)])
    assert main(["run", "--config", str(cfg), "--num_trials", "0"]) == 1


def test_analyze_full_trace(tmp_path, capsys):
    out = small_run(tmp_path, "--trace-full")
    tr = out / "traces"
    stem = str(tr / "m8_K2_t0")
    report = tmp_path / "report.json"
    args = ["analyze", "--trace", str(tr / "rhtp-q1_m8_K2_t0.jsonl"), "--matrix", stem + "_phi.mat",
            "--y", stem + "_y.mat", "--x-star", stem + "_xstar.mat", "--K", "2", "--mu", "0.3",
            "--q", "1", "--eps", "0.42", "--gamma", "0.3", "--output", str(report)]
    assert main(args) == 0
    doc = json.loads(report.read_text())
    assert doc["condition_flags"]["delta_exact"] is True
    assert doc["observed_iters"]["iterations"] >= 0
    # the conjugacy check needs no hypotheses, so it always runs
    assert not [v for v in doc["violations"] if v["check"] == "conjugacy"]


def test_analyze_rejects_compact_trace(tmp_path, capsys):
    out = small_run(tmp_path, "--save_traces")
    tr = out / "traces"
    stem = str(tr / "m8_K2_t0")
    args = ["analyze", "--trace", str(tr / "htp_m8_K2_t0.jsonl"), "--matrix", stem + "_phi.mat",
            "--y", stem + "_y.mat", "--K", "2", "--mu", "0.3", "--algorithm", "htp"]
    assert main(args) == 1
    assert "full iterates" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rhtp", "preset", "paper-msd"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["K"] == [51]
