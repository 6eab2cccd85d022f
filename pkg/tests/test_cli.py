import csv
import json
import subprocess
import sys

import pytest

from bess_sizing.cli import build_parser, main

CONFIG = """
[paths]
data = "fixture:ripple"
output = "out"

[catalog]
models = [[2.0, 1.0], [4.0, 2.0]]

[battery]
e_nominal = 3.0
power = 1.5

[lifetime]
window_days = 1
resolution = 60
max_years = 0.011

[experiment]
resolutions = [5, 60]
plots = true
"""


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(CONFIG)
    return str(path)


def run(*argv):
    return main([str(a) for a in argv])


def test_parser_lists_commands():
    sub = build_parser()._subparsers._group_actions[0]
    assert set(sub.choices) == {"dispatch", "simulate", "size", "sensitivity", "compare", "validate"}


def test_validate(cfg, capsys):
    assert run("validate", "--config", cfg) == 0
    assert "config ok" in capsys.readouterr().out


def test_dry_run_prints_resolved_config(cfg, capsys):
    assert run("simulate", "--config", cfg, "--dry-run", "--policy", "greedy", "--resolution", "15") == 0
    resolved = json.loads(capsys.readouterr().out)
    assert resolved["lifetime"]["policy"] == "greedy" and resolved["lifetime"]["resolution"] == 15


def test_dispatch_window(cfg, tmp_path):
    assert run("dispatch", "--config", cfg, "--window", 2, "--dump-lp") == 0
    out = tmp_path / "out"
    report = json.loads((out / "dispatch_window_2.json").read_text())
    assert report["steps"] == 24 and report["max_residual"] <= 1e-6
    assert report["c_bd"] == pytest.approx((3.0 * 252.37 + 1.5 * 503.30) / (4800 * 3.0))
    assert (out / "window_2.lp").is_file()
    with open(out / "dispatch_window_2.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 24


def test_dispatch_greedy_with_model(cfg, tmp_path):
    assert run("dispatch", "--config", cfg, "--policy", "greedy", "--model", 2, "--c-bd", 0.1) == 0
    report = json.loads((tmp_path / "out" / "dispatch_window_1.json").read_text())
    assert report["method"] == "greedy" and report["c_bd"] == 0.1


def test_simulate_then_resume(cfg, tmp_path):
    assert run("simulate", "--config", cfg) == 0
    out = tmp_path / "out"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["lifetime"]["status"] == "cap-hit" and summary["lifetime"]["windows"] == 5
    assert {"npv", "dpb", "scr", "ssr"} <= set(summary["economics"])
    first = (out / "window_log.csv").read_text()
    assert run("simulate", "--config", cfg, "--resume") == 0
    assert (out / "window_log.csv").read_text() == first
    assert (out / "dod_histogram.svg").is_file() and (out / "cycle_histogram.csv").is_file()


def test_size_and_plot(cfg, tmp_path, capsys):
    assert run("size", "--config", cfg) == 0
    out = tmp_path / "out"
    report = json.loads((out / "size_sweep.json").read_text())
    assert len(report["models"]) == 2 and report["complete"]
    assert (out / "npv_vs_capacity.svg").is_file()
    assert "best model" in capsys.readouterr().out


def test_sensitivity(cfg, tmp_path):
    assert run("sensitivity", "--config", cfg, "--model", 1, "--resolution", 5) == 0
    with open(tmp_path / "out" / "sensitivity_deltas.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["resolution_min"] for r in rows] == ["5", "60"]
    assert (tmp_path / "out" / "lifetime_vs_resolution.svg").is_file()


def test_compare(cfg, tmp_path, capsys):
    assert run("compare", "--config", cfg, "--model", 1) == 0
    result = json.loads((tmp_path / "out" / "compare.json").read_text())
    assert result["dominance"] and result["windows_compared"] == 5
    assert "optimal cost <= greedy cost in 5/5 windows" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ("validate", "--config", "missing.toml"),
    ("dispatch", "--model", 99),
    ("dispatch", "--window", 0),
])
def test_config_errors_exit_2(argv, tmp_path, capsys):
    assert run(*argv, "--output", tmp_path) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_bad_checkpoint_exits_2(cfg, tmp_path):
    assert run("simulate", "--config", cfg, "--resume") == 2


def test_solver_error_exits_3(cfg, tmp_path):
    path = tmp_path / "tight.toml"
    path.write_text(CONFIG + "\n[grid]\np_import_max = 0.05\n")
    assert run("simulate", "--config", path) == 3
    assert run("size", "--config", path) == 3


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bess_sizing.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "bess-sizing" in proc.stdout
