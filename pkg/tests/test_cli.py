"""Command-line entry points: exit codes, outputs and artifacts."""

import json
import subprocess
import sys

import numpy as np
import pytest

from plap.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, SOLVE_PRESETS, build_parser, main
from plap.grid import INTERVAL, TimeMesh, build_grid, read_field_csv, read_stf_csv, stack, write_stf_csv

SUBCOMMANDS = ("solve", "eigen", "closed-form", "saddle", "check", "scenario", "report")


def _kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_for_every_subcommand(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    assert "usage: plap " + cmd in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "plap", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "closed-form" in out.stdout


def test_solve_extinction_config(tmp_path, capsys):
    cfg = tmp_path / "ext.cfg"
    cfg.write_text("preset = extinction\nn = 257\nmT = 120\nstride = 20\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "run")]) == EXIT_OK
    s = _kv(capsys.readouterr().out)
    assert s["p"] == "1.5" and s["lambda"] == "0" and s["n"] == "257"
    assert float(s["sup_final"]) < 1e-6 < float(s["sup_initial"])
    u = read_stf_csv(s["solution_csv"])
    assert u.grid.n == 257 and u.tmesh.T == SOLVE_PRESETS["extinction"]["T"]
    assert (tmp_path / "run" / "summary.txt").exists()


def test_solve_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "heat.cfg"
    cfg.write_text("p = 2\nlambda = 0\nn = 33\nT = 0.1\nmT = 10\ninitial = sine\n")
    args = ["solve", "--config", str(cfg), "--n", "17", "--source", "one", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    s = _kv(capsys.readouterr().out)
    assert s["n"] == "17"


def test_solve_bad_config_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("p = 2\np = 3\n")
    assert main(["solve", "--config", str(cfg)]) == EXIT_USAGE
    assert "duplicate key 'p'" in capsys.readouterr().err
    assert main(["solve", "--p", "2"]) == EXIT_USAGE
    assert "missing required keys" in capsys.readouterr().err
    cfg.write_text("p = 2\nlambda = 0\nn = 9\nT = 1\nmT = 2\ninitial = zero\nsource = lots\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_USAGE


def test_solve_uses_out_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PLAP_OUT_DIR", str(tmp_path / "env"))
    argv = ["solve", "--p", "3", "--lambda", "0", "--n", "9", "--T", "0.1", "--mT", "2", "--initial", "zero"]
    assert main(argv) == EXIT_OK
    assert (tmp_path / "env" / "solution.csv").exists()


def test_eigen(tmp_path, capsys):
    assert main(["eigen", "--p", "3", "--domain", "0", "1", "--n", "513", "--out", str(tmp_path)]) == EXIT_OK
    s = _kv(capsys.readouterr().out)
    ref = float(s["lambda1_closed_form"])
    assert float(s["lambda1_rayleigh"]) == pytest.approx(ref, rel=1e-2)
    assert float(s["lambda1_shooting"]) == pytest.approx(ref, rel=1e-6)
    phi = read_field_csv(s["eigenfunction_csv"])
    assert phi.grid.n == 513


def test_closed_form(tmp_path, capsys):
    path = tmp_path / "b.csv"
    assert main(["closed-form", "barenblatt", "--params", "t=0", "n=121", "--out", str(path)]) == EXIT_OK
    s = _kv(capsys.readouterr().out)
    assert float(s["support_radius"]) == pytest.approx(3.3019272488946267, rel=1e-11)  # printed to 12 digits
    u = read_field_csv(path)
    assert u.grid.n == 121 and u.values.max() == 1.0
    assert main(["closed-form", "cauchy", "--params", "t=2"]) == EXIT_OK
    assert float(_kv(capsys.readouterr().out)["cauchy_value"]) == 1.0
    assert main(["closed-form", "cauchy", "--params", "q=2"]) == EXIT_USAGE


def test_saddle(tmp_path, capsys):
    assert main(["saddle", "--n", "1025", "--out", str(tmp_path)]) == EXIT_OK
    s = _kv(capsys.readouterr().out)
    assert float(s["energy_w0_plus_1e-3_z"]) < float(s["energy_w0"])
    assert float(s["zeta_0.001"]) < 0
    z = np.loadtxt(s["zeta_csv"], delimiter=",", skiprows=1)
    assert z.shape == (21, 2)


def _runs(tmp_path):
    g = build_grid(INTERVAL, 9, a=-1, b=1)
    tm = TimeMesh(1.0, 3)
    zero = write_stf_csv(stack(g, tm, lambda x, t: 0 * x), tmp_path / "zero.csv")
    neg = write_stf_csv(stack(g, tm, lambda x, t: -t * (1 - x**2)), tmp_path / "neg.csv")
    return zero, neg


def test_check_exit_codes(tmp_path, capsys):
    zero, neg = _runs(tmp_path)
    assert main(["check", "--principle", "wmp", "--run", zero]) == EXIT_OK
    assert "WMP" in capsys.readouterr().out
    assert main(["check", "--principle", "wmp", "--run", neg]) == EXIT_VIOLATED
    assert main(["check", "--principle", "wcp", "--run", neg, "--run2", zero]) == EXIT_OK
    assert main(["check", "--principle", "wcp", "--run", zero, "--run2", neg]) == EXIT_VIOLATED
    assert main(["check", "--principle", "wcp", "--run", zero]) == EXIT_USAGE
    assert main(["check", "--principle", "wmp", "--run", str(tmp_path / "missing.csv")]) == EXIT_USAGE


def test_unknown_scenario(capsys):
    assert main(["scenario", "no-such"]) == EXIT_USAGE
    assert "unknown scenario 'no-such'" in capsys.readouterr().err


def test_scenario_preflight(tmp_path, capsys):
    assert main(["scenario", "extinction", "--n", "9", "--out", str(tmp_path)]) == EXIT_USAGE
    assert "needs n >= 513" in capsys.readouterr().err


def test_scenario_and_report(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["scenario", "logistic-nonuniqueness", "--out", out]) == EXIT_OK
    text = capsys.readouterr().out
    assert "pass=true" in text
    data = json.loads((tmp_path / "logistic-nonuniqueness" / "result.json").read_text())
    assert data["passed"] is True
    assert main(["report", "--in", out]) == EXIT_OK
    rep = capsys.readouterr().out
    assert "mismatch=0" in rep
    assert (tmp_path / "status_matrix.csv").read_text().startswith("regime,p,principle,empirical,paper\n")


def test_report_without_results(tmp_path, capsys):
    assert main(["report", "--in", str(tmp_path)]) == EXIT_USAGE


def test_parser_lists_all_subcommands():
    text = build_parser().format_help()
    for cmd in SUBCOMMANDS:
        assert cmd in text
