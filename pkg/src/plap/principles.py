"""Discrete predicates for the maximum, comparison and Hopf principles.

Strict inequalities are read with a tolerance band: "u > 0" means u > tol.
Time indices in witnesses count slices (0 is the initial datum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import IncompatibleFieldsError
from .grid import Field, Grid, SpaceTimeField

HOLDS, VIOLATED, INCONCLUSIVE = "holds", "violated", "inconclusive"


@dataclass(frozen=True)
class PrincipleReport:
    principle: str
    verdict: str
    margin: float
    witness: Optional[Tuple[int, int]]
    tolerance: float
    details: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self):
        return self.verdict == HOLDS

    def as_text(self):
        lines = [
            f"principle={self.principle}",
            f"verdict={self.verdict}",
            f"margin={self.margin:.12g}",
            f"witness={'none' if self.witness is None else '%d,%d' % self.witness}",
            f"tolerance={self.tolerance:.6g}",
        ]
        lines += [f"{k}={_fmt(v)}" for k, v in self.details.items()]
        return "\n".join(lines)


def _fmt(v):
    return f"{v:.12g}" if isinstance(v, float) else str(v)


def default_tol(grid: Grid, newton_tol=1e-10):
    return max(10 * newton_tol, grid.h**2)


def _tol(stf, tol):
    return default_tol(stf.grid) if tol is None else float(tol)


def _same_mesh(u: SpaceTimeField, v: SpaceTimeField):
    if not (u.grid.same_as(v.grid) and u.tmesh.same_as(v.tmesh)):
        raise IncompatibleFieldsError("runs use different grids or time meshes")


def _argmin2(a):
    k, i = np.unravel_index(int(np.argmin(a)), a.shape)
    return int(k), int(i)


def check_wmp(stf: SpaceTimeField, tol=None) -> PrincipleReport:
    """Nonnegativity everywhere; margin is the global minimum."""
    tol = _tol(stf, tol)
    k, i = _argmin2(stf.values)
    m = float(stf.values[k, i])
    return PrincipleReport("WMP", HOLDS if m >= -tol else VIOLATED, m, (k, i), tol)


def check_wcp(u: SpaceTimeField, v: SpaceTimeField, tol=None) -> PrincipleReport:
    """u <= v everywhere; margin is min(v - u)."""
    _same_mesh(u, v)
    tol = _tol(u, tol)
    d = v.values - u.values
    k, i = _argmin2(d)
    m = float(d[k, i])
    return PrincipleReport("WCP", HOLDS if m >= -tol else VIOLATED, m, (k, i), tol)


def positivity_indices(stf: SpaceTimeField, tol=None):
    """(k_bar, k_star): last slice counts over which the solution is positive on all / some interior nodes."""
    tol = _tol(stf, tol)
    inner = stf.values[1:, stf.grid.interior]
    allpos = np.all(inner > tol, axis=1)
    anypos = np.any(inner > tol, axis=1)
    kb = len(allpos) if allpos.all() else int(np.argmin(allpos))
    ks = len(anypos) if anypos.all() else int(np.argmin(anypos))
    return kb, ks


def positivity_time(stf: SpaceTimeField, tol=None):
    """(t_bar, t_star): times up to which u > tol on the whole interior, and somewhere in the interior."""
    kb, ks = positivity_indices(stf, tol)
    return kb * stf.dt, ks * stf.dt


def normal_derivatives(values, grid: Grid):
    """Outer normal derivatives at the boundary nodes from second-order one-sided stencils."""
    h = grid.h
    out = []
    for b in grid.boundary:
        if b == grid.n - 1:
            out.append((3 * values[b] - 4 * values[b - 1] + values[b - 2]) / (2 * h))
        else:
            out.append((3 * values[b] - 4 * values[b + 1] + values[b + 2]) / (2 * h))
    return np.array(out)


def check_hopf(stf: SpaceTimeField, k, tol=None) -> PrincipleReport:
    """Strictly negative outer normal derivative at every boundary node of slice k.

    The hypothesis is a positive interior; a slice with interior values <= tol
    yields an inconclusive verdict, with the measured derivatives still reported.
    """
    tol = _tol(stf, tol)
    k = int(k) % (stf.tmesh.mT + 1)
    vals = stf.values[k]
    dn = normal_derivatives(vals, stf.grid)
    j = int(np.argmax(dn))
    margin = float(-dn[j])
    details = {
        "time": float(stf.times[k]),
        "max_normal_derivative": float(dn.max()),
        "max_abs_normal_derivative": float(np.abs(dn).max()),
        "min_interior_value": float(vals[stf.grid.interior].min()),
    }
    if vals[stf.grid.interior].min() <= tol:
        verdict = INCONCLUSIVE
    else:
        verdict = HOLDS if margin > tol else VIOLATED
    return PrincipleReport("HMP", verdict, margin, (k, stf.grid.boundary[j]), tol, details)


def check_scp(u: SpaceTimeField, v: SpaceTimeField, tol=None, burn_in=1) -> PrincipleReport:
    """Strict ordering on the positivity window of v.

    Over slices burn_in..k_bar(v): min(v - u) on interior nodes and
    min(du/dnu - dv/dnu) on boundary nodes must both exceed tol.
    """
    _same_mesh(u, v)
    tol = _tol(u, tol)
    kb, _ = positivity_indices(v, tol)
    if kb < burn_in:
        return PrincipleReport("SCP", INCONCLUSIVE, float("nan"), None, tol, {"k_bar": kb})
    ks = slice(burn_in, kb + 1)
    grid = u.grid
    d = (v.values - u.values)[ks][:, grid.interior]
    ki, ii = _argmin2(d)
    interior_margin = float(d[ki, ii])
    du = np.array([normal_derivatives(r, grid) for r in u.values[ks]])
    dv = np.array([normal_derivatives(r, grid) for r in v.values[ks]])
    flux_gap = du - dv
    kf, jf = _argmin2(flux_gap)
    flux_margin = float(flux_gap[kf, jf])
    interior_nodes = np.flatnonzero(grid.interior)
    if interior_margin <= flux_margin:
        margin, witness = interior_margin, (ki + burn_in, int(interior_nodes[ii]))
    else:
        margin, witness = flux_margin, (kf + burn_in, grid.boundary[jf])
    details = {"interior_margin": interior_margin, "flux_margin": flux_margin, "k_bar": kb}
    return PrincipleReport("SCP", HOLDS if margin > tol else VIOLATED, margin, witness, tol, details)


def check_smp(stf: SpaceTimeField, tol=None, burn_in=1) -> PrincipleReport:
    """Either u vanishes identically or u > tol on every interior node of slices burn_in onward."""
    tol = _tol(stf, tol)
    if np.max(np.abs(stf.values)) <= tol:
        return PrincipleReport("SMP", HOLDS, 0.0, None, tol, {"identical_zero": True})
    d = stf.values[burn_in:, stf.grid.interior]
    k, i = _argmin2(d)
    m = float(d[k, i])
    witness = (k + burn_in, int(np.flatnonzero(stf.grid.interior)[i]))
    return PrincipleReport("SMP", HOLDS if m > tol else VIOLATED, m, witness, tol, {"identical_zero": False})


def check_strict_dichotomy(u: SpaceTimeField, v: SpaceTimeField, tol=None, burn_in=1) -> PrincipleReport:
    """Either u and v coincide, or v - u > tol on every interior node of slices burn_in onward.

    A contact point (v - u <= tol) while the runs differ somewhere witnesses a
    failure of the strong comparison principle for the ordered pair.
    """
    _same_mesh(u, v)
    tol = _tol(u, tol)
    grid = u.grid
    diff = v.values - u.values
    if np.max(np.abs(diff)) <= tol:
        return PrincipleReport("SCP", HOLDS, 0.0, None, tol, {"identical": True})
    d = diff[burn_in:, grid.interior]
    k, i = _argmin2(d)
    m = float(d[k, i])
    witness = (k + burn_in, int(np.flatnonzero(grid.interior)[i]))
    return PrincipleReport("SCP", HOLDS if m > tol else VIOLATED, m, witness, tol, {"identical": False})


def support_radius(u: Field, tol=None, center=0.0) -> float:
    """Largest distance from center among nodes where u > tol (0 for an empty support)."""
    tol = default_tol(u.grid) if tol is None else tol
    mask = u.values > tol
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(u.nodes[mask] - center)))


def extinction_time_estimate(stf: SpaceTimeField, tol=None) -> float:
    """dt times the first slice index with sup-norm below tol; +inf if the run never gets there."""
    tol = _tol(stf, tol)
    sup = np.max(np.abs(stf.values), axis=1)
    below = np.flatnonzero(sup < tol)
    return float(below[0] * stf.dt) if below.size else math.inf


def extinction_time_fit(stf: SpaceTimeField, p, window=(1e-3, 1.0)) -> float:
    """Extinction time from a straight-line fit of sup^{2-p} against t.

    For separable fast-diffusion solutions sup^{2-p} decreases linearly to
    zero; the fit uses slices with sup / sup(0) inside window and returns
    the zero of the line. Returns +inf if fewer than three slices qualify.
    """
    if not 1 < p < 2:
        raise ValueError(f"extinction fit needs p in (1,2), got {p}")
    sup = np.max(np.abs(stf.values), axis=1)
    rel = sup / sup[0] if sup[0] > 0 else sup
    sel = (rel >= window[0]) & (rel <= window[1])
    if sel.sum() < 3:
        return math.inf
    slope, icpt = np.polyfit(stf.times[sel], sup[sel] ** (2 - p), 1)
    return float(-icpt / slope) if slope < 0 else math.inf
