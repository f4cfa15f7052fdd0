"""Scenario registry, artifacts, determinism and the status matrix."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plap import scenarios as sc
from plap.errors import InvalidParameterError, PreflightError, UnknownScenarioError
from plap.principles import HOLDS, VIOLATED, PrincipleReport

FAST = {"n": 513, "mT": 400}


def test_registry_names():
    assert sc.scenario_names() == [
        "barenblatt-smp-failure", "extinction", "smp-positivity", "saddle-nonuniqueness",
        "logistic-nonuniqueness", "wcp-regimes", "scp-slow-diffusion",
    ]


def test_unknown_scenario():
    with pytest.raises(UnknownScenarioError, match="known: barenblatt-smp-failure"):
        sc.run_scenario("no-such")
    with pytest.raises(UnknownScenarioError):
        sc.run_scenarios(["extinction", "no-such"])


def test_preflight_and_override_checks(tmp_path):
    with pytest.raises(PreflightError) as err:
        sc.run_scenario("saddle-nonuniqueness", {"n": 1025}, tmp_path)
    assert err.value.min_n == 2049
    with pytest.raises(PreflightError):
        sc.run_scenario("extinction", {"mT": 2}, tmp_path)
    with pytest.raises(InvalidParameterError, match="override 'p' not allowed"):
        sc.run_scenario("extinction", {"p": 3}, tmp_path)


def test_regime_classification():
    assert sc.regime(1.5, -1.0, 2.0) == ("lambda<=0", "p<2")
    assert sc.regime(3.0, 1.0, 2.0) == ("0<lambda<=lambda1", "p>2")
    assert sc.regime(1.5, 3.0, 2.0) == ("lambda>lambda1", "p<2")
    assert sc.regime(2.0, 5.0, 2.0) == ("any lambda", "p=2")


def test_extinction_scenario_small_mesh(tmp_path):
    res = sc.run_scenario("extinction", {"n": 513, "mT": 1200}, tmp_path)
    assert res.passed
    assert res.details["t_star"] - res.details["t_bar"] <= 1.2 / 1200 * (1 + 1e-9)
    assert abs(res.details["extinction_estimate"] - 1.0) <= 2 * 1.2 / 1200
    assert (tmp_path / "extinction" / "result.json").exists()


def test_logistic_scenario_cells(tmp_path):
    res = sc.run_scenario("logistic-nonuniqueness", None, tmp_path)
    assert res.passed
    symbols = {(c.regime, c.principle): c.symbol for c in res.cells}
    assert symbols[("lambda>lambda1", "WMP")] == "-"
    for key in ("residual_zero", "residual_plus", "residual_minus"):
        assert res.details[key] < 1e-3


def test_result_json_round_trip(tmp_path):
    res = sc.run_scenario("scp-slow-diffusion", {"n": 257, "mT": 200}, tmp_path)
    back = sc.load_results(tmp_path)[0]
    assert back.name == res.name and back.passed == res.passed and back.claim == res.claim
    assert [r.verdict for r in back.reports] == [r.verdict for r in res.reports]
    assert back.cells == res.cells
    assert back.expected == res.expected
    assert all(str(tmp_path) in a for a in back.artifacts)


def test_runs_are_deterministic(tmp_path):
    a = sc.run_scenario("wcp-regimes", {"pairs": 3}, tmp_path / "a")
    b = sc.run_scenario("wcp-regimes", {"pairs": 3}, tmp_path / "b")
    assert a.artifacts and len(a.artifacts) == len(b.artifacts)
    for pa, pb in zip(a.artifacts, b.artifacts):
        assert open(pa, "rb").read() == open(pb, "rb").read()
    ja = json.loads((tmp_path / "a" / "wcp-regimes" / "result.json").read_text())
    jb = json.loads((tmp_path / "b" / "wcp-regimes" / "result.json").read_text())
    assert ja == jb


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 1.0))
def test_random_data_is_ordered(seed, amp):
    g = sc._interval(65)
    u0, v0, f, gg = sc.random_ordered_data(np.random.default_rng(seed), g, amp)
    assert np.all(u0 <= v0) and np.all(f <= gg)
    assert np.all(np.abs(u0) <= amp) and np.all(np.abs(v0) <= amp)
    assert u0[0] == u0[-1] == v0[0] == v0[-1] == 0


def test_sweep_seed_changes_data():
    g = sc._interval(65)
    x = sc.random_ordered_data(np.random.default_rng(1), g)
    y = sc.random_ordered_data(np.random.default_rng(2), g)
    assert not np.array_equal(x[0], y[0])


def test_run_scenarios_sequential(tmp_path):
    res = sc.run_scenarios(["logistic-nonuniqueness", "scp-slow-diffusion"], tmp_path)
    assert [r.name for r in res] == ["logistic-nonuniqueness", "scp-slow-diffusion"]
    assert {p.parent.name for p in tmp_path.glob("*/result.json")} == {r.name for r in res}


def _fake(name, cells):
    return sc.ScenarioResult(name, [PrincipleReport("WMP", HOLDS, 0.0, None, 1e-9)], [], "", True,
                             [sc.Cell(*c, name) for c in cells], {}, [HOLDS])


def test_status_matrix_aggregation():
    results = [
        _fake("a", [("lambda<=0", "p<2", "WMP", "+", "instance"),
                    ("lambda<=0", "p<2", "SMP", "-", "counterexample"),
                    ("lambda<=0", "p<2", "SMP", "±", "instance"),
                    ("0<lambda<=lambda1", "p<2", "WCP", "-", "counterexample"),
                    ("any lambda", "p=2", "WMP", "-", "counterexample")]),
    ]
    rows = {(r[0], r[1], r[2]): r for r in sc.status_matrix_rows(results)}
    assert rows[("lambda<=0", "p<2", "WMP")][3:] == ("+", "+", "match")
    assert rows[("lambda<=0", "p<2", "SMP")][3:] == ("-/±", "-/±", "match")
    assert rows[("0<lambda<=lambda1", "p<2", "WCP")][5] == "empirical-only"
    assert rows[("any lambda", "p=2", "WMP")][5] == "mismatch"
    assert rows[("lambda<=0", "p>2", "WMP")][3:] == ("n/a", "+", "untested")
    assert len(rows) == 28
    csv = sc.status_matrix_csv(results).splitlines()
    assert csv[0] == "regime,p,principle,empirical,paper" and len(csv) == 29
    assert "mismatch=1" in sc.status_matrix_report(results)
    # a counterexample hides the '+' evidence of the same cell
    more = results + [_fake("b", [("any lambda", "p=2", "WMP", "+", "instance")])]
    assert sc.aggregate_cells(more)[("any lambda", "p=2", "WMP")] == "-"


def test_required_published_cells():
    t = sc.PUBLISHED_TABLE
    assert t[("lambda<=0", "p<2")][0] == "+"
    assert t[("lambda>lambda1", "p<2")] == ("-", "-", "-", "-")
    assert t[("any lambda", "p=2")] == ("+", "+", "+", "+")
    assert t[("0<lambda<=lambda1", "p<2")][2] == "-/?"
    assert VIOLATED == "violated"
