"""``plap`` command line: solve, eigen, closed-form, saddle, check, scenario, report.

Exit codes: 0 success or principle holds, 1 principle violated or scenario
failed, 2 usage error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import closed_forms as cf
from . import elliptic as el
from . import principles as pr
from . import scenarios as sc
from .config import INTEGER, REAL, STRING, Key, parse_config
from .errors import (
    BracketingError,
    ConfigError,
    ConvergenceError,
    IncompatibleFieldsError,
    InvalidGeometryError,
    InvalidParameterError,
    NonFiniteValueError,
    PreflightError,
    SingularFluxError,
    StepFailureError,
    UnknownScenarioError,
)
from .grid import (
    INTERVAL,
    RADIAL,
    Field,
    ProblemSpec,
    Reaction,
    TimeMesh,
    build_grid,
    read_stf_csv,
    write_field_csv,
    write_stf_csv,
)
from .parabolic import solve_parabolic

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
USAGE_ERRORS = (ConfigError, InvalidParameterError, InvalidGeometryError, IncompatibleFieldsError,
                NonFiniteValueError, UnknownScenarioError, PreflightError, FileNotFoundError)
SOLVER_ERRORS = (StepFailureError, ConvergenceError, BracketingError, SingularFluxError)

INITIAL_KINDS = ("zero", "sine", "barenblatt", "extinction")
SOLVE_SCHEMA = {
    "preset": Key(STRING, choices=("extinction", "barenblatt")),
    "p": Key(REAL, required=True),
    "lambda": Key(REAL, required=True),
    "domain": Key(STRING, default=INTERVAL, choices=(INTERVAL, RADIAL)),
    "a": Key(REAL, default=-1.0),
    "b": Key(REAL, default=1.0),
    "R": Key(REAL, default=1.0),
    "N": Key(INTEGER, default=1),
    "n": Key(INTEGER, required=True),
    "T": Key(REAL, required=True),
    "mT": Key(INTEGER, required=True),
    "initial": Key(STRING, required=True, choices=INITIAL_KINDS),
    "amplitude": Key(REAL, default=1.0),
    "t0": Key(REAL, default=0.5),
    "reaction": Key(STRING, default="power", choices=("power", "logistic")),
    "weight": Key(REAL, default=1.0),
    "source": Key(STRING, default="zero"),
    "eps_reg": Key(REAL, default=None),
    "newton_tol": Key(REAL, default=1e-10),
    "stride": Key(INTEGER, default=10),
}
SOLVE_PRESETS = {
    "extinction": dict(p=1.5, **{"lambda": 0.0}, a=-1.0, b=1.0, n=2049, T=1.2, mT=2000, initial="extinction",
                       t0=0.5, eps_reg=1e-12),
    "barenblatt": dict(p=3.0, **{"lambda": 0.0}, a=-6.0, b=6.0, n=2049, T=1.0, mT=2000, initial="barenblatt",
                       eps_reg=0.0),
}


def _out_dir(arg):
    return Path(arg if arg else os.environ.get("PLAP_OUT_DIR", "plap-out"))


def _kv(key, val):
    return f"{key}={val:.12g}" if isinstance(val, float) else f"{key}={val}"


# ---------------------------------------------------------------- subcommands


def _initial(cfg, grid):
    kind, amp = cfg.enum("initial"), cfg.real("amplitude")
    x = grid.nodes
    if kind == "zero":
        return np.zeros(grid.n)
    if kind == "sine":
        if grid.kind == INTERVAL:
            return amp * np.sin(np.pi * (x - grid.a) / grid.length)
        return amp * np.cos(0.5 * np.pi * x / grid.R)
    if kind == "barenblatt":
        return cf.barenblatt(x, 0.0, cf.BarenblattParams(p=cfg.real("p"), N=grid.N))
    params = cf.ExtinctionParams.build(cfg.real("p"), cfg.real("t0"), grid.n)
    return cf.extinction_solution(x, 0.0, params)


SOURCE_PRESETS = {"zero": 0.0, "one": 1.0}


def _source(cfg):
    """Named source preset or a constant value; None for the zero source."""
    raw = cfg.string("source")
    if raw in SOURCE_PRESETS:
        f0 = SOURCE_PRESETS[raw]
    else:
        try:
            f0 = float(raw)
        except ValueError:
            raise ConfigError(f"key 'source' expects one of {', '.join(SOURCE_PRESETS)} or a real constant, "
                              f"got {raw!r}") from None
    return None if f0 == 0 else (lambda x, t: np.full_like(x, f0))


def cmd_solve(args):
    over = {k: getattr(args, k.replace("lambda", "lam"), None) for k in SOLVE_SCHEMA}
    cfg = parse_config(args.config, over, SOLVE_SCHEMA, SOLVE_PRESETS)
    if cfg.enum("domain") == INTERVAL:
        grid = build_grid(INTERVAL, cfg.integer("n"), a=cfg.real("a"), b=cfg.real("b"))
    else:
        grid = build_grid(RADIAL, cfg.integer("n"), R=cfg.real("R"), N=cfg.integer("N"))
    tm = TimeMesh(cfg.real("T"), cfg.integer("mT"))
    reaction = Reaction()
    if cfg.enum("reaction") == "logistic":
        reaction = Reaction("logistic", Field(grid, np.full(grid.n, cfg.real("weight"))))
    spec = ProblemSpec(
        cfg.real("p"), cfg.real("lambda"), grid, Field(grid, _initial(cfg, grid)),
        source=_source(cfg), reaction=reaction,
        eps_reg=cfg.real("eps_reg"), newton_tol=cfg.real("newton_tol"),
    )
    u = solve_parabolic(spec, tm)
    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = write_stf_csv(u, out / "solution.csv", cfg.integer("stride"))
    sup = np.max(np.abs(u.values), axis=1)
    summary = [
        _kv("p", spec.p), _kv("lambda", spec.lam), _kv("n", grid.n), _kv("mT", tm.mT), _kv("T", tm.T),
        _kv("eps_reg", spec.eps),
        _kv("newton_iters_total", sum(r.newton_iters for r in u.reports)),
        _kv("newton_iters_max", max(r.newton_iters for r in u.reports)),
        _kv("final_residual_max", max(r.final_residual for r in u.reports)),
        _kv("steps_with_substeps", sum(r.substeps > 1 for r in u.reports)),
        _kv("sup_initial", float(sup[0])), _kv("sup_final", float(sup[-1])),
        _kv("solution_csv", path),
    ]
    text = "\n".join(summary) + "\n"
    (out / "summary.txt").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_eigen(args):
    a, b = args.domain
    grid = build_grid(INTERVAL, args.n, a=a, b=b)
    L = grid.length
    lines = []
    if args.method in ("rayleigh", "both"):
        lam_r, phi = el.lambda1_rayleigh(grid, args.p)
        lines.append(_kv("lambda1_rayleigh", lam_r))
        if args.out:
            out = _out_dir(args.out)
            out.mkdir(parents=True, exist_ok=True)
            lines.append(_kv("eigenfunction_csv", write_field_csv(phi, out / "eigenfunction.csv")))
    if args.method in ("shooting", "both"):
        lam_s = el.lambda1_shooting(args.p, L)
        lines.append(_kv("lambda1_shooting", lam_s))
    if args.method == "both":
        lines.append(_kv("relative_gap", abs(lam_r - lam_s) / lam_s))
    lines.append(_kv("lambda1_closed_form", cf.lambda1_interval(args.p, L)))
    print("\n".join(lines))
    return EXIT_OK


CLOSED_FORM_PARAMS = {
    "barenblatt": {"p": 3.0, "N": 1, "C": 1.0, "alpha": 1.0, "t": 0.0, "n": 2049, "half_width": 6.0},
    "extinction": {"p": 1.5, "t0": 0.5, "t": 0.0, "n": 2049},
    "cauchy": {"p": 1.5, "t": 1.0},
}


def _closed_form_params(name, pairs):
    params = dict(CLOSED_FORM_PARAMS[name])
    for item in pairs or ():
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in params:
            raise ConfigError(f"closed form {name!r} takes key=value with keys {', '.join(params)}, got {item!r}")
        try:
            params[key] = type(params[key])(float(val)) if isinstance(params[key], int) else float(val)
        except ValueError:
            raise ConfigError(f"parameter {key!r} expects a number, got {val!r}") from None
    return params


def cmd_closed_form(args):
    P0 = _closed_form_params(args.name, args.params)
    lines = []
    t = P0["t"]
    if args.name == "barenblatt":
        P = cf.BarenblattParams(p=P0["p"], N=P0["N"], C=P0["C"], alpha=P0["alpha"])
        hw = P0["half_width"]
        grid = build_grid(INTERVAL, P0["n"], a=-hw, b=hw)
        vals = cf.barenblatt(grid.nodes, t, P)
        lines.append(_kv("support_radius", float(cf.barenblatt_support_radius(t, P))))
    elif args.name == "extinction":
        P = cf.ExtinctionParams.build(P0["p"], P0["t0"], P0["n"])
        grid = P.profile.grid
        vals = cf.extinction_solution(grid.nodes, t, P)
        lines += [_kv("extinction_time", cf.extinction_time(P)),
                  _kv("amplitude", float(cf.extinction_amplitude(t, P))),
                  _kv("profile_max", float(P.profile.values.max()))]
    else:
        lines.append(_kv("cauchy_value", cf.cauchy_solution(t, P0["p"])))
        print("\n".join(lines))
        return EXIT_OK
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        lines.append(_kv("csv", write_field_csv(Field(grid, vals), out)))
    print("\n".join(lines))
    return EXIT_OK


def cmd_saddle(args):
    grid = build_grid(INTERVAL, args.n, a=-1.0, b=1.0)
    c = el.build_saddle_construction(grid, args.p, args.lam, eps=args.eps, eps1=args.eps1)
    espec = c.energy_spec
    e0 = el.energy(c.w0, espec)
    lines = [_kv("m", c.m), _kv("x_peak", c.x_peak), _kv("energy_w0", e0),
             _kv("energy_w0_plus_1e-3_z", el.energy(c.w0.with_values(c.w0.values + 1e-3 * c.z.values), espec))]
    lines += [_kv(f"zeta_{t:g}", el.zeta(t, c)) for t in (1e-2, 1e-3, 1e-4)]
    lines.append(_kv("h_min", float(c.h_src.values.min())))
    lines.append(_kv("h_max", float(c.h_src.values.max())))
    if args.out:
        out = _out_dir(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, fld in (("w0", c.w0), ("z", c.z), ("h", c.h_src)):
            lines.append(_kv(f"{name}_csv", write_field_csv(fld, out / f"{name}.csv")))
        ts = np.logspace(-6, -1, 21)
        table = np.column_stack([ts, [el.zeta(t, c) for t in ts]])
        path = out / "zeta.csv"
        np.savetxt(path, table, fmt="%.17g", delimiter=",", header="t,zeta", comments="", newline="\n")
        lines.append(_kv("zeta_csv", path))
    print("\n".join(lines))
    return EXIT_OK


PAIR_CHECKS = {"wcp": pr.check_wcp, "scp": pr.check_scp, "dichotomy": pr.check_strict_dichotomy}
SINGLE_CHECKS = {"wmp": pr.check_wmp, "smp": pr.check_smp}


def cmd_check(args):
    u = read_stf_csv(args.run, args.kind, args.N)
    name = args.principle
    if name in PAIR_CHECKS:
        if args.run2 is None:
            raise ConfigError(f"principle {name} compares two runs; pass --run2")
        rep = PAIR_CHECKS[name](u, read_stf_csv(args.run2, args.kind, args.N), args.tol)
    elif name == "hopf":
        rep = pr.check_hopf(u, args.slice, args.tol)
    else:
        rep = SINGLE_CHECKS[name](u, args.tol)
    print(rep.as_text())
    return EXIT_VIOLATED if rep.verdict == pr.VIOLATED else EXIT_OK


def cmd_scenario(args):
    if args.name == "all":
        results = sc.run_scenarios(None, _out_dir(args.out), args.jobs)
        for res in results:
            print(f"scenario={res.name} pass={str(res.passed).lower()}")
        return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATED
    over = {"n": args.n, "mT": args.mT, "seed": args.seed, "pairs": args.pairs, "tol": args.tol}
    res = sc.run_scenario(args.name, over, _out_dir(args.out))
    lines = [f"scenario={res.name}", f"claim={res.claim}", f"pass={str(res.passed).lower()}"]
    lines += [_kv(k, v) for k, v in res.details.items()]
    for rep, exp in zip(res.reports, res.expected):
        lines += ["", f"expected={exp}", rep.as_text()]
    print("\n".join(lines))
    return EXIT_OK if res.passed else EXIT_VIOLATED


def cmd_report(args):
    in_dir = _out_dir(args.in_dir)
    results = sc.load_results(in_dir)
    if not results:
        raise ConfigError(f"no scenario results under {in_dir}; run `plap scenario <name>` first")
    sys.stdout.write(sc.status_matrix_report(results))
    csv_path = Path(args.csv) if args.csv else in_dir / "status_matrix.csv"
    csv_path.write_text(sc.status_matrix_csv(results))
    print(f"csv={csv_path}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser():
    ap = argparse.ArgumentParser(prog="plap", description="Evolution p-Laplacian solver and principle checker.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run a time-dependent solve from a config file and flags")
    s.add_argument("--config", help="key = value file; flags override its values")
    s.add_argument("--preset", choices=tuple(SOLVE_PRESETS), help="fill defaults from a named preset")
    for key in ("p", "a", "b", "R", "T", "amplitude", "t0", "weight"):
        s.add_argument(f"--{key}", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--source", help="zero, one or a real constant")
    s.add_argument("--reaction", choices=("power", "logistic"))
    s.add_argument("--eps-reg", dest="eps_reg", type=float, help="flux regularization (default: h)")
    s.add_argument("--newton-tol", dest="newton_tol", type=float)
    for key in ("n", "N", "mT", "stride"):
        s.add_argument(f"--{key}", type=int)
    s.add_argument("--domain", choices=(INTERVAL, RADIAL))
    s.add_argument("--initial", choices=INITIAL_KINDS)
    s.add_argument("--out", help="artifact directory (default $PLAP_OUT_DIR or ./plap-out)")
    s.set_defaults(fn=cmd_solve)

    e = sub.add_parser("eigen", help="first Dirichlet eigenvalue on an interval")
    e.add_argument("--p", type=float, required=True)
    e.add_argument("--domain", nargs=2, type=float, default=(0.0, 2.0), metavar=("A", "B"),
                   help="interval endpoints (default 0 2)")
    e.add_argument("--n", type=int, default=2049)
    e.add_argument("--method", choices=("rayleigh", "shooting", "both"), default="both")
    e.add_argument("--out", help="directory for the eigenfunction CSV")
    e.set_defaults(fn=cmd_eigen)

    c = sub.add_parser("closed-form", help="sample a closed-form solution")
    c.add_argument("name", choices=tuple(CLOSED_FORM_PARAMS))
    c.add_argument("--params", nargs="*", metavar="KEY=VALUE",
                   help="; ".join(f"{k}: " + ", ".join(f"{a}={b}" for a, b in v.items())
                                  for k, v in CLOSED_FORM_PARAMS.items()))
    c.add_argument("--out", help="CSV path for the sampled field")
    c.set_defaults(fn=cmd_closed_form)

    d = sub.add_parser("saddle", help="build the non-minimizing critical point construction")
    d.add_argument("--n", type=int, default=4097)
    d.add_argument("--p", type=float, default=1.5)
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--eps", type=float, default=0.05)
    d.add_argument("--eps1", type=float, default=0.49)
    d.add_argument("--out", help="directory for w0, z, h and zeta CSVs")
    d.set_defaults(fn=cmd_saddle)

    k = sub.add_parser("check", help="evaluate a principle on run CSVs (t,x,value)")
    k.add_argument("--principle", choices=("wmp", "smp", "wcp", "scp", "hopf", "dichotomy"), required=True)
    k.add_argument("--run", required=True)
    k.add_argument("--run2")
    k.add_argument("--tol", type=float)
    k.add_argument("--slice", type=int, default=-1, help="slice index for hopf")
    k.add_argument("--kind", choices=(INTERVAL, RADIAL), default=INTERVAL)
    k.add_argument("--N", type=int, default=1)
    k.set_defaults(fn=cmd_check)

    r = sub.add_parser("scenario", help="run a named scenario: " + ", ".join(sc.scenario_names()) + ", or all")
    r.add_argument("name")
    r.add_argument("--jobs", type=int, default=1, help="worker processes when name is 'all'")
    r.add_argument("--n", type=int)
    r.add_argument("--mT", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--pairs", type=int)
    r.add_argument("--tol", type=float)
    r.add_argument("--out", help="artifact directory (default $PLAP_OUT_DIR or ./plap-out)")
    r.set_defaults(fn=cmd_scenario)

    t = sub.add_parser("report", help="status matrix from saved scenario results")
    t.add_argument("--in", dest="in_dir", help="directory holding <scenario>/result.json")
    t.add_argument("--csv", help="output CSV path (default <in>/status_matrix.csv)")
    t.set_defaults(fn=cmd_report)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except USAGE_ERRORS as exc:
        print(f"plap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SOLVER_ERRORS as exc:
        print(f"plap: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
