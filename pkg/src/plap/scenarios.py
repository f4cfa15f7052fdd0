"""Named, reproducible experiments and the principle status matrix.

Each scenario solves one or more problems, runs principle checks with a
declared expected verdict, writes CSV artifacts plus ``result.json`` into
``out_dir/<name>`` and contributes evidence to cells of the status matrix
(rows: lambda regime and p class, columns: WMP/SMP/WCP/SCP).

Evidence strength per cell:
  counterexample  a violated check on a certified instance, gives '-'
  instance        a check that holds on one instance, gives '+' or '±' as declared
  sweep           randomized ordered-data runs, gives '+' or '-'
A counterexample overrides '+' evidence from instances and sweeps.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import closed_forms as cf
from . import elliptic as el
from .errors import InvalidParameterError, PreflightError, UnknownScenarioError
from .grid import (
    INTERVAL,
    Field,
    ProblemSpec,
    Reaction,
    SpaceTimeField,
    TimeMesh,
    build_grid,
    stack,
    sup_diff,
    write_field_csv,
    write_stf_csv,
)
from .parabolic import residual_field, solve_parabolic
from .principles import (
    HOLDS,
    INCONCLUSIVE,
    VIOLATED,
    PrincipleReport,
    check_hopf,
    check_scp,
    check_smp,
    check_strict_dichotomy,
    check_wcp,
    check_wmp,
    extinction_time_estimate,
    extinction_time_fit,
    positivity_indices,
    support_radius,
)

PRINCIPLES = ("WMP", "SMP", "WCP", "SCP")
ROWS = (
    ("lambda<=0", "p<2"),
    ("lambda<=0", "p>2"),
    ("0<lambda<=lambda1", "p<2"),
    ("0<lambda<=lambda1", "p>2"),
    ("lambda>lambda1", "p<2"),
    ("lambda>lambda1", "p>2"),
    ("any lambda", "p=2"),
)
# Published status; '?' marks cells without satisfactory information.
PUBLISHED_TABLE = {
    ("lambda<=0", "p<2"): ("+", "-/±", "+", "-/±/?"),
    ("lambda<=0", "p>2"): ("+", "-/±", "+", "-/±"),
    ("0<lambda<=lambda1", "p<2"): ("+", "-/±", "-/?", "-/?"),
    ("0<lambda<=lambda1", "p>2"): ("+", "-/±", "+", "-/±"),
    ("lambda>lambda1", "p<2"): ("-", "-", "-", "-"),
    ("lambda>lambda1", "p>2"): ("+", "-/±", "+", "-/±"),
    ("any lambda", "p=2"): ("+", "+", "+", "+"),
}
SYMBOL_ORDER = ("-", "±", "+")
ALLOWED_OVERRIDES = ("n", "mT", "seed", "pairs", "tol")
DEFAULT_SEED = 20240607
SWEEP_TOL = 1e-9  # ten times the default Newton tolerance


def regime(p, lam, lam1):
    """Row key of the status matrix for a (p, lambda) pair; lam1 is the first eigenvalue for p."""
    if p == 2:
        return ("any lambda", "p=2")
    pc = "p<2" if p < 2 else "p>2"
    if lam <= 0:
        return ("lambda<=0", pc)
    return ("0<lambda<=lambda1" if lam <= lam1 else "lambda>lambda1", pc)


@dataclass
class Cell:
    regime: str
    p: str
    principle: str
    symbol: str
    strength: str
    source: str


@dataclass
class ScenarioResult:
    name: str
    reports: List[PrincipleReport]
    artifacts: List[str]
    claim: str
    passed: bool
    cells: List[Cell] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    expected: List[str] = field(default_factory=list)

    def to_json(self):
        return {
            "name": self.name,
            "claim": self.claim,
            "passed": self.passed,
            "artifacts": [os.path.basename(a) for a in self.artifacts],
            "reports": [
                {
                    "principle": r.principle,
                    "verdict": r.verdict,
                    "expected": e,
                    "margin": _num(r.margin),
                    "witness": None if r.witness is None else list(r.witness),
                    "tolerance": r.tolerance,
                    "details": {k: _num(v) for k, v in r.details.items()},
                }
                for r, e in zip(self.reports, self.expected)
            ],
            "cells": [asdict(c) for c in self.cells],
            "details": {k: _num(v) for k, v in self.details.items()},
        }

    @classmethod
    def from_json(cls, data, base_dir=None):
        reports = [
            PrincipleReport(
                r["principle"],
                r["verdict"],
                _unnum(r["margin"]),
                None if r["witness"] is None else tuple(r["witness"]),
                r["tolerance"],
                r["details"],
            )
            for r in data["reports"]
        ]
        arts = [str(Path(base_dir) / a) if base_dir else a for a in data["artifacts"]]
        return cls(
            data["name"],
            reports,
            arts,
            data["claim"],
            data["passed"],
            [Cell(**c) for c in data["cells"]],
            data["details"],
            [r["expected"] for r in data["reports"]],
        )


def _num(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def _unnum(v):
    return float(v) if isinstance(v, str) else v


class _Run:
    """Collects checks with expected verdicts, cell evidence and artifacts for one scenario."""

    def __init__(self, name, claim, out_dir):
        self.name, self.claim = name, claim
        self.dir = None if out_dir is None else Path(out_dir) / name
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)
        self.reports, self.expected, self.cells, self.artifacts = [], [], [], []
        self.details = {}
        self.facts = []

    def check(self, report: PrincipleReport, expected, cell=None, symbol=None):
        """Record a report; cell=(regime, pclass) adds evidence for report.principle."""
        self.reports.append(report)
        self.expected.append(expected)
        if cell is not None and report.verdict != INCONCLUSIVE:
            if report.verdict == VIOLATED:
                sym, strength = "-", "counterexample"
            else:
                sym, strength = symbol or "+", "instance"
            self.cells.append(Cell(cell[0], cell[1], report.principle, sym, strength, self.name))
        return report

    def fact(self, key, value, ok):
        """A scalar acceptance fact; it counts toward pass/fail like a report."""
        self.details[key] = value
        self.facts.append((key, bool(ok)))

    def stf(self, u: SpaceTimeField, fname, stride):
        if self.dir is not None:
            self.artifacts.append(write_stf_csv(u, self.dir / fname, stride))

    def field(self, u: Field, fname):
        if self.dir is not None:
            self.artifacts.append(write_field_csv(u, self.dir / fname))

    def table(self, header, rows, fname):
        if self.dir is not None:
            path = self.dir / fname
            np.savetxt(path, np.asarray(rows, dtype=float), fmt="%.17g", delimiter=",",
                       header=header, comments="", newline="\n")
            self.artifacts.append(str(path))

    def result(self):
        ok_reports = all(r.verdict == e for r, e in zip(self.reports, self.expected))
        ok_facts = all(ok for _, ok in self.facts)
        self.details["failed_facts"] = ",".join(k for k, ok in self.facts if not ok) or "none"
        res = ScenarioResult(self.name, self.reports, self.artifacts, self.claim, ok_reports and ok_facts,
                             self.cells, self.details, self.expected)
        if self.dir is not None:
            with open(self.dir / "result.json", "w") as fh:
                json.dump(res.to_json(), fh, indent=1, sort_keys=True)
        return res


def _stride(mT, keep=100):
    return max(1, mT // keep)


def _interval(n, a=-1.0, b=1.0):
    return build_grid(INTERVAL, n, a=a, b=b)


# ---------------------------------------------------------------- scenarios


def _barenblatt(o, out_dir):
    run = _Run("barenblatt-smp-failure", "finite propagation: the strong maximum principle fails for "
               "p > 2 (shifted Barenblatt solution, slow diffusion)", out_dir)
    P = cf.BarenblattParams()
    grid = _interval(o["n"], -6.0, 6.0)
    tm = TimeMesh(1.0, o["mT"])
    u0 = Field(grid, cf.barenblatt(grid.nodes, 0.0, P))
    spec = ProblemSpec(P.p, 0.0, grid, u0, eps_reg=0.0)
    u = solve_parabolic(spec, tm)
    row = regime(P.p, 0.0, np.inf)
    tol = o.get("tol", 1e-10)

    rad_num = np.array([support_radius(u.slice(k), tol) for k in range(tm.mT + 1)])
    rad_ref = cf.barenblatt_support_radius(u.times, P)
    err = float(np.max(np.abs(rad_num - rad_ref)))
    run.fact("support_error", err, err <= 2 * grid.h)
    run.fact("support_error_in_h", err / grid.h, True)
    kb, ks = positivity_indices(u, tol)
    run.fact("t_bar", kb * tm.dt, kb * tm.dt < 3 * tm.dt)
    run.fact("t_star", ks * tm.dt, True)
    exact = stack(grid, tm, lambda x, t: cf.barenblatt(x, t, P))
    run.fact("sup_error_final", sup_diff(u.final, exact.final), True)

    run.check(check_wmp(u), HOLDS, row)
    run.check(check_smp(u, tol), VIOLATED, row)
    hopf = run.check(check_hopf(u, -1), INCONCLUSIVE)
    run.fact("hopf_abs_normal_derivative", hopf.details["max_abs_normal_derivative"],
             hopf.details["max_abs_normal_derivative"] < hopf.tolerance)
    zero = stack(grid, tm, lambda x, t: np.zeros_like(x))
    run.check(check_strict_dichotomy(zero, u, tol), VIOLATED, row)

    run.stf(u, "solution.csv", _stride(tm.mT))
    run.table("t,numeric_radius,exact_radius", np.column_stack([u.times, rad_num, rad_ref]), "support.csv")
    return run.result()


def _extinction(o, out_dir):
    run = _Run("extinction", "finite-time extinction of the separable fast-diffusion solution at "
               "t0/(2-p) (p = 1.5, t0 = 0.5)", out_dir)
    p, t0 = 1.5, 0.5
    grid = _interval(o["n"])
    tm = TimeMesh(1.2, o["mT"])
    params = cf.ExtinctionParams.build(p, t0, grid.n)
    u0 = Field(grid, cf.extinction_solution(grid.nodes, 0.0, params))
    spec = ProblemSpec(p, 0.0, grid, u0, eps_reg=1e-12)
    u = solve_parabolic(spec, tm)
    row = regime(p, 0.0, np.inf)
    t_ext = cf.extinction_time(params)
    sup = np.max(np.abs(u.values), axis=1)
    t = u.times
    dt = tm.dt

    # backward Euler lags the exact collapse by a few steps, so the gate uses the
    # line fit of sup^{2-p}; threshold crossings are reported against the closed form
    est = extinction_time_fit(u, p)
    run.fact("extinction_estimate", est, abs(est - t_ext) <= 2 * dt)
    exact_sup = cf.extinction_amplitude(t, params) * float(params.v(0.0))
    for thr in (1e-2, 1e-3):
        k_num = extinction_time_estimate(u, thr)
        k_ref = float(t[np.flatnonzero(exact_sup < thr)[0]])
        run.fact(f"threshold_{thr:g}_lag_in_dt", (k_num - k_ref) / dt, True)
    near = np.abs(t - t_ext) <= 2 * dt + 1e-12
    run.fact("sup_near_extinction", float(sup[near].max()), sup[near].max() < 1e-3)
    early = t < 0.9
    run.fact("min_sup_before_0.9", float(sup[early].min()), sup[early].min() > 1e-2)
    # values below the Newton tolerance are unresolved, so that is the positivity threshold
    ptol = o.get("tol", spec.newton_tol)
    kb, ks = positivity_indices(u, ptol)
    run.fact("t_bar", kb * dt, True)
    run.fact("t_star", ks * dt, abs(ks - kb) <= 1)

    run.check(check_wmp(u), HOLDS, row)
    run.check(check_smp(u, ptol), VIOLATED, row)
    zero = stack(grid, tm, lambda x, s: np.zeros_like(x))
    run.check(check_strict_dichotomy(zero, u, ptol), VIOLATED, row)

    run.stf(u, "solution.csv", _stride(tm.mT))
    run.table("t,sup_numeric,sup_exact", np.column_stack([t, sup, exact_sup]), "sup_norm.csv")
    return run.result()


def _smp_positivity(o, out_dir):
    run = _Run("smp-positivity", "positivity and the Hopf boundary sign for fast diffusion with "
               "nonnegative nontrivial source (p = 1.5, lambda = 0, f = 1)", out_dir)
    p = 1.5
    grid = _interval(o["n"])
    tm = TimeMesh(1.0, o["mT"])
    zero0 = Field(grid, np.zeros(grid.n))
    v = solve_parabolic(ProblemSpec(p, 0.0, grid, zero0, source=lambda x, t: np.ones_like(x)), tm)
    u = stack(grid, tm, lambda x, t: np.zeros_like(x))  # f = 0, zero data: the trivial run
    row = regime(p, 0.0, np.inf)
    tol = o.get("tol")

    run.check(check_wmp(v, tol), HOLDS, row)
    run.check(check_smp(v, tol), HOLDS, row, "±")
    k_half = int(round(0.5 / tm.dt))
    hopf = run.check(check_hopf(v, k_half, tol), HOLDS)
    run.fact("hopf_margin_t0.5", hopf.margin, True)
    ks = list(range(max(1, tm.mT // 20), tm.mT + 1, max(1, tm.mT // 20)))
    margins = [check_hopf(v, k, tol) for k in ks]
    run.fact("hopf_all_sampled_slices", all(r.holds for r in margins), all(r.holds for r in margins))
    run.check(check_wcp(u, v, tol), HOLDS, row)
    run.check(check_scp(u, v, tol), HOLDS, row, "±")

    run.stf(v, "solution.csv", _stride(tm.mT))
    return run.result()


def _cauchy_source(h: Field, p):
    hv = h.values
    return lambda x, t: hv * cf.cauchy_solution(t, p) ** (p - 1)


def _saddle(o, out_dir):
    run = _Run("saddle-nonuniqueness", "two different solutions of the zero-data problem with source "
               "h(x)|v(t)|^{p-2}v(t) built from a non-minimizing critical point (p = 1.5, lambda = 1)",
               out_dir)
    p, lam = 1.5, 1.0
    grid = _interval(o["n"])
    tm = TimeMesh(1.0, o["mT"])
    lam1 = el.lambda1_shooting(p, grid.length)
    run.fact("lambda1", lam1, lam <= lam1)
    row = regime(p, lam, lam1)
    c = el.build_saddle_construction(grid, p, lam)
    espec = c.energy_spec
    z_vals = [el.zeta(s, c) for s in (1e-2, 1e-3, 1e-4)]
    run.fact("zeta_1e-3", z_vals[1], z_vals[1] < 0)
    run.fact("zeta_decreasing", z_vals[2] - z_vals[0], z_vals[2] < z_vals[1] < z_vals[0])
    e0 = el.energy(c.w0, espec)
    e_pert = el.energy(c.w0.with_values(c.w0.values + 1e-3 * c.z.values), espec)
    run.fact("energy_w0", e0, True)
    run.fact("energy_drop_along_z", e_pert - e0, e_pert < e0)

    # multistart descent; keep the lowest energy minimizer
    starts = [np.zeros(grid.n), -c.w0.values, c.w0.values + 0.1 * c.z.values]
    best = None
    for s in starts:
        s = s.copy()
        s[~grid.interior] = 0.0
        w = el.minimize_energy(espec, grid, Field(grid, s))
        e = el.energy(w, espec)
        if best is None or e < best[1]:
            best = (w, e)
    w1, e1 = best
    run.fact("energy_w1", e1, e1 < e0)

    spec = ProblemSpec(p, lam, grid, Field(grid, np.zeros(grid.n)), source=_cauchy_source(c.h_src, p))
    v = lambda t: cf.cauchy_solution(t, p)
    u0 = stack(grid, tm, lambda x, t: c.w0.values * v(t))
    u1 = stack(grid, tm, lambda x, t: w1.values * v(t))
    band = 0.02
    mask = c.seam_mask(band) & grid.interior
    r0 = np.abs(residual_field(u0, spec).values)
    r1 = np.abs(residual_field(u1, spec).values)
    run.fact("residual_w0_off_seams", float(r0[:, mask].max()), r0[:, mask].max() < 1e-3)
    run.fact("residual_w0_all", float(r0.max()), True)
    run.fact("residual_w1", float(r1.max()), r1.max() < 1e-3)
    run.fact("seam_band", band, True)
    sd = sup_diff(u0.final, u1.final)
    run.fact("sup_diff_final", sd, sd > 0.01)

    a = check_wcp(u0, u1)
    b = check_wcp(u1, u0)
    lo, hi = (u0, u1) if a.verdict == VIOLATED else (u1, u0)
    run.check(a if a.verdict == VIOLATED else b, VIOLATED, row)
    run.check(check_strict_dichotomy(lo, hi), VIOLATED, row)

    for name, fld in (("w0.csv", c.w0), ("z.csv", c.z), ("h.csv", c.h_src), ("w1.csv", w1)):
        run.field(fld, name)
    run.table("t,zeta", np.column_stack([[1e-2, 1e-3, 1e-4], z_vals]), "zeta.csv")
    run.stf(u1, "u1.csv", _stride(tm.mT, 10))
    return run.result()


def _logistic(o, out_dir):
    run = _Run("logistic-nonuniqueness", "zero data admit the solutions 0 and +-w(x)v(t) beyond the first "
               "eigenvalue, so every maximum and comparison principle fails (p = 1.5, lambda = 2 lambda1)",
               out_dir)
    p = 1.5
    grid = _interval(o["n"])
    tm = TimeMesh(1.0, o["mT"])
    lam1 = el.lambda1_shooting(p, grid.length)
    lam = 2 * lam1
    row = regime(p, lam, lam1)
    w = el.solve_logistic(grid, p, lam)
    spec = ProblemSpec(p, lam, grid, Field(grid, np.zeros(grid.n)))
    v = lambda t: cf.cauchy_solution(t, p)
    plus = stack(grid, tm, lambda x, t: w.values * v(t))
    minus = stack(grid, tm, lambda x, t: -w.values * v(t))
    zero = stack(grid, tm, lambda x, t: np.zeros_like(x))
    for tag, u in (("zero", zero), ("plus", plus), ("minus", minus)):
        r = float(np.abs(residual_field(u, spec).values).max())
        run.fact(f"residual_{tag}", r, r < 1e-3)
    run.fact("lambda", lam, True)
    run.fact("sup_w", float(np.max(w.values)), np.max(w.values) > 1e-3)

    run.check(check_wmp(minus), VIOLATED, row)
    run.check(check_smp(minus), VIOLATED, row)
    run.check(check_wcp(plus, zero), VIOLATED, row)
    run.check(check_strict_dichotomy(plus, zero), VIOLATED, row)

    run.field(w, "w.csv")
    run.stf(plus, "u_plus.csv", _stride(tm.mT, 10))
    return run.result()


def _scp_slow(o, out_dir):
    run = _Run("scp-slow-diffusion", "strong comparison for slow diffusion when the upper solution has a "
               "strictly negative outer normal derivative (p = 3, lambda = 0)", out_dir)
    p = 3.0
    grid = _interval(o["n"])
    tm = TimeMesh(0.5, o["mT"])
    zero0 = Field(grid, np.zeros(grid.n))
    v = solve_parabolic(ProblemSpec(p, 0.0, grid, zero0, source=lambda x, t: np.ones_like(x)), tm)
    u = solve_parabolic(ProblemSpec(p, 0.0, grid, zero0), tm)
    row = regime(p, 0.0, np.inf)
    tol = o.get("tol")
    scp = run.check(check_scp(u, v, tol), HOLDS, row, "±")
    run.fact("flux_margin", scp.details.get("flux_margin", float("nan")), True)
    run.check(check_wcp(u, v, tol), HOLDS, row)
    run.check(check_wmp(v, tol), HOLDS, row)
    run.stf(v, "upper.csv", _stride(tm.mT))
    return run.result()


# ---------------------------------------------------------------- randomized sweep


def _modes(x, a, b, k):
    return np.sin(k * np.pi * (x - a) / (b - a))


def random_ordered_data(rng, grid, amp=0.5):
    """(u0, v0, f, g) with u0 <= v0, f <= g; the initial data vanish on the boundary."""
    x, a, b = grid.nodes, grid.a, grid.b
    bump = lambda: _modes(x, a, b, 1) * np.exp(-(((x - rng.uniform(a, b)) / rng.uniform(0.2, 1.0)) ** 2))
    u0 = amp * sum(rng.uniform(-1, 1) * _modes(x, a, b, k) for k in range(1, 5)) / 2
    v0 = u0 + amp * rng.uniform(0, 1) * bump()
    f = amp * (rng.uniform(-1, 1) + rng.uniform(-1, 1) * x + rng.uniform(-1, 1) * np.cos(np.pi * x))
    g = f + amp * rng.uniform(0, 1) * np.abs(bump())
    u0, v0 = np.clip(u0, -amp, amp), np.clip(v0, -amp, amp)
    v0 = np.maximum(v0, u0)
    u0[[0, -1]] = v0[[0, -1]] = 0.0  # sin(k pi) rounds to ~1e-16
    return u0, v0, f, g


def _const_source(vals):
    return lambda x, t: vals


def wcp_sweep(p, lam, pairs=50, seed=DEFAULT_SEED, n=65, mT=40, T=0.2, amp=0.5, tol=SWEEP_TOL, strict=False):
    """Solve `pairs` random ordered-data pairs; returns (wcp reports, wmp reports, strict reports).

    WMP samples solve with the nonnegative data differences (v0 - u0, g - f).
    With strict=True the strong forms (SMP, strict ordering) are also checked.
    """
    grid = _interval(n)
    tm = TimeMesh(T, mT)
    rng = np.random.default_rng([seed, int(round(p * 100)), int(round(abs(lam) * 1e6)), int(lam < 0)])
    wcp, wmp, strong = [], [], []
    for _ in range(pairs):
        u0, v0, f, g = random_ordered_data(rng, grid, amp)
        su = ProblemSpec(p, lam, grid, Field(grid, u0), source=_const_source(f))
        sv = ProblemSpec(p, lam, grid, Field(grid, v0), source=_const_source(g))
        u, v = solve_parabolic(su, tm), solve_parabolic(sv, tm)
        wcp.append(check_wcp(u, v, tol))
        sd = ProblemSpec(p, lam, grid, Field(grid, v0 - u0), source=_const_source(g - f))
        d = solve_parabolic(sd, tm)
        wmp.append(check_wmp(d, tol))
        if strict:
            # strictness near the far boundary is below tol for the first slices; judge from T/2 on
            strong.append(check_smp(d, tol, burn_in=mT // 2))
            strong.append(check_strict_dichotomy(u, v, tol, burn_in=mT // 2))
    return wcp, wmp, strong


def _wcp_regimes(o, out_dir):
    run = _Run("wcp-regimes", "weak comparison and weak maximum principles across the lambda regimes "
               "for ordered random data (p in {1.5, 3})", out_dir)
    seed, pairs = int(o["seed"]), int(o["pairs"])
    n = max(o["n"], 33)
    mT = o["mT"]
    tol = o.get("tol", SWEEP_TOL)
    rows = []
    cases = []
    for p in (1.5, 3.0):
        lam1 = cf.lambda1_interval(p, 2.0)
        cases += [(p, lam, lam1) for lam in (-1.0, 0.0, lam1 / 2, 2 * lam1)]
    cases += [(2.0, lam, cf.lambda1_interval(2.0, 2.0)) for lam in (-1.0, 1.0)]
    for p, lam, lam1 in cases:
        row = regime(p, lam, lam1)
        wcp, wmp, strong = wcp_sweep(p, lam, pairs, seed, n, mT, tol=tol, strict=p == 2)
        for principle, reps in (("WCP", wcp), ("WMP", wmp)):
            ok = all(r.holds for r in reps)
            run.cells.append(Cell(row[0], row[1], principle, "+" if ok else "-", "sweep", run.name))
            rows.append([p, lam, PRINCIPLES.index(principle), min(r.margin for r in reps), float(ok)])
        if strong:
            for principle in ("SMP", "SCP"):
                reps = [r for r in strong if r.principle == principle]
                ok = all(r.holds for r in reps)
                run.cells.append(Cell(row[0], row[1], principle, "+" if ok else "-", "sweep", run.name))
                rows.append([p, lam, PRINCIPLES.index(principle), min(r.margin for r in reps), float(ok)])
    run.details.update(seed=seed, pairs=pairs, n=n, mT=mT, T=0.2, tol=tol)
    # soundness: a sweep must never contradict a published '+'
    bad = [c for c in run.cells if c.symbol == "-" and PUBLISHED_TABLE[(c.regime, c.p)][PRINCIPLES.index(c.principle)] == "+"]
    run.fact("contradicts_published_plus", len(bad), not bad)
    run.table("p,lambda,principle_index,min_margin,holds", rows, "sweep.csv")
    return run.result()


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class _Entry:
    fn: Callable
    min_n: int
    defaults: dict


REGISTRY: Dict[str, _Entry] = {
    "barenblatt-smp-failure": _Entry(_barenblatt, 513, {"n": 2049, "mT": 2000}),
    "extinction": _Entry(_extinction, 513, {"n": 2049, "mT": 2000}),
    "smp-positivity": _Entry(_smp_positivity, 129, {"n": 2049, "mT": 2000}),
    "saddle-nonuniqueness": _Entry(_saddle, 2049, {"n": 4097, "mT": 200}),
    "logistic-nonuniqueness": _Entry(_logistic, 257, {"n": 2049, "mT": 200}),
    "wcp-regimes": _Entry(_wcp_regimes, 33, {"n": 65, "mT": 40, "pairs": 50, "seed": DEFAULT_SEED}),
    "scp-slow-diffusion": _Entry(_scp_slow, 129, {"n": 1025, "mT": 1000}),
}


def scenario_names():
    return list(REGISTRY)


def default_out_dir():
    return os.environ.get("PLAP_OUT_DIR", "plap-out")


def run_scenario(name, overrides: Optional[dict] = None, out_dir=None) -> ScenarioResult:
    """Run a registry scenario. Overrides may set n, mT, seed, pairs, tol; out_dir=None uses PLAP_OUT_DIR."""
    if name not in REGISTRY:
        raise UnknownScenarioError(f"unknown scenario {name!r}; known: {', '.join(scenario_names())}")
    entry = REGISTRY[name]
    opts = dict(entry.defaults)
    for k, val in (overrides or {}).items():
        if val is None:
            continue
        if k not in ALLOWED_OVERRIDES:
            raise InvalidParameterError(f"override {k!r} not allowed; choose from {', '.join(ALLOWED_OVERRIDES)}")
        opts[k] = val
    opts.setdefault("seed", DEFAULT_SEED)
    if opts["n"] < entry.min_n:
        raise PreflightError(f"scenario {name!r} needs n >= {entry.min_n} for its tolerances, got {opts['n']}",
                             entry.min_n)
    if opts["mT"] < 4:
        raise PreflightError(f"scenario {name!r} needs mT >= 4, got {opts['mT']}", entry.min_n)
    res = entry.fn(opts, default_out_dir() if out_dir is None else out_dir)
    res.details.setdefault("n", opts["n"])
    res.details.setdefault("mT", opts["mT"])
    return res


def run_scenarios(names=None, out_dir=None, jobs=1) -> List[ScenarioResult]:
    """Run several scenarios (all by default), in worker processes when jobs > 1.

    Each scenario writes into its own subdirectory, so concurrent runs do not collide.
    """
    names = scenario_names() if names is None else list(names)
    for name in names:
        if name not in REGISTRY:
            raise UnknownScenarioError(f"unknown scenario {name!r}; known: {', '.join(scenario_names())}")
    out_dir = default_out_dir() if out_dir is None else out_dir
    if jobs <= 1:
        return [run_scenario(name, None, out_dir) for name in names]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_scenario, name, None, out_dir) for name in names]
        return [f.result() for f in futures]


def load_results(in_dir) -> List[ScenarioResult]:
    """Read every <in_dir>/<scenario>/result.json."""
    out = []
    for path in sorted(Path(in_dir).glob("*/result.json")):
        with open(path) as fh:
            out.append(ScenarioResult.from_json(json.load(fh), path.parent))
    return out


# ---------------------------------------------------------------- status matrix


def _tokens(s):
    return set(s.split("/"))


def aggregate_cells(results) -> Dict[tuple, str]:
    """Empirical symbol string per (regime, pclass, principle); 'n/a' when untested."""
    ev = {}
    for res in results:
        for c in res.cells:
            ev.setdefault((c.regime, c.p, c.principle), []).append(c)
    out = {}
    for row in ROWS:
        for pr in PRINCIPLES:
            cells = ev.get(row + (pr,), [])
            syms = set()
            if any(c.strength == "counterexample" or (c.strength == "sweep" and c.symbol == "-") for c in cells):
                syms.add("-")
            if any(c.symbol == "±" for c in cells):
                syms.add("±")
            if "-" not in syms and any(c.symbol == "+" for c in cells):
                syms.add("+")
            out[row + (pr,)] = "/".join(s for s in SYMBOL_ORDER if s in syms) or "n/a"
    return out


def status_matrix_rows(results):
    """Rows (regime, p, principle, empirical, published, status); status is match, mismatch, untested or empirical-only."""
    agg = aggregate_cells(results)
    rows = []
    for row in ROWS:
        for j, pr in enumerate(PRINCIPLES):
            emp = agg[row + (pr,)]
            published = PUBLISHED_TABLE[row][j]
            if emp == "n/a":
                status = "untested"
            elif "?" in published:
                status = "empirical-only"
            else:
                status = "match" if _tokens(emp) <= _tokens(published) else "mismatch"
            rows.append((row[0], row[1], pr, emp, published, status))
    return rows


def status_matrix_csv(results) -> str:
    lines = ["regime,p,principle,empirical,paper"]
    lines += [",".join(r[:5]) for r in status_matrix_rows(results)]
    return "\n".join(lines) + "\n"


def status_matrix_report(results) -> str:
    """Text matrix: one line per row, each cell 'empirical [published]' with status flags."""
    rows = status_matrix_rows(results)
    head = f"{'regime':<20}{'p':<6}" + "".join(f"{pr:<30}" for pr in PRINCIPLES)
    lines = [head, "-" * len(head)]
    for i, row in enumerate(ROWS):
        cells = rows[4 * i: 4 * i + 4]
        txt = []
        for r in cells:
            flag = {"match": "", "mismatch": " MISMATCH", "untested": "", "empirical-only": " (empirical-only)"}[r[5]]
            txt.append(f"{r[3]} [{r[4]}]{flag}")
        lines.append(f"{row[0]:<20}{row[1]:<6}" + "".join(f"{t:<30}" for t in txt))
    n_match = sum(r[5] == "match" for r in rows)
    n_bad = sum(r[5] == "mismatch" for r in rows)
    lines.append("")
    lines.append(f"cells: match={n_match} mismatch={n_bad} "
                 f"empirical-only={sum(r[5] == 'empirical-only' for r in rows)} "
                 f"untested={sum(r[5] == 'untested' for r in rows)}")
    lines.append("legend: empirical [published]; '?' = no satisfactory published information")
    return "\n".join(lines) + "\n"
