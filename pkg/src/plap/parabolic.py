"""Backward-Euler time stepping, residual certification and the linearization matrix.

One step solves, at the free nodes,

    F(u) = u - u_prev - dt (Delta_{p,eps} u + r(u) + f(., t_next)) = 0

by damped Newton with the tridiagonal Jacobian. The residual is measured in
this dt-scaled form, which has the units of u and a rounding floor that
does not grow as dt shrinks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.linalg import solve_banded

from .elliptic import dflux, flux, p_laplacian_values, stiffness_bands
from .errors import (
    IncompatibleFieldsError,
    InvalidParameterError,
    SingularDirectionError,
    StepFailureError,
)
from .grid import Field, ProblemSpec, SpaceTimeField, TimeMesh


@dataclass(frozen=True)
class StepReport:
    newton_iters: int
    final_residual: float
    damped: bool
    substeps: int = 1


# ---------------------------------------------------------------- linearization


@dataclass(frozen=True, eq=False)
class LinearizationMatrix:
    dim: int
    entries: np.ndarray

    def quadratic_form(self, xi):
        xi = np.asarray(xi, dtype=float)
        return float(xi @ self.entries @ xi)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)


def linearization_matrix(a, p) -> LinearizationMatrix:
    """I + (p-2) a a^T / |a|^2: eigenvalue p-1 along a and 1 across it."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    aa = float(a @ a)
    if aa == 0.0:
        raise SingularDirectionError("direction a must be nonzero")
    M = np.eye(a.size) + (p - 2) * np.outer(a, a) / aa
    M = 0.5 * (M + M.T)
    M.flags.writeable = False
    return LinearizationMatrix(a.size, M)


# ---------------------------------------------------------------- reactions


def _weight(spec: ProblemSpec):
    return spec.reaction.a.values if spec.reaction.kind == "logistic" else None


def reaction_values(u, spec: ProblemSpec):
    """Vectorized reaction r(u) at every node."""
    base = spec.lam * flux(u, spec.p)
    if spec.reaction.kind == "logistic":
        return base * (_weight(spec) - u)
    return base


def reaction_derivative(u, spec: ProblemSpec, floor=1e-8):
    """dr/du with |u| floored, since |u|^{p-2} is unbounded at 0 when p < 2."""
    p, lam = spec.p, spec.lam
    au = np.maximum(np.abs(u), floor) if p < 2 else np.abs(u)
    d = lam * (p - 1) * au ** (p - 2)
    if spec.reaction.kind == "logistic":
        # d/du [lam|u|^{p-2}u(a - u)] = lam|u|^{p-2}((p-1)a - p u)
        return lam * au ** (p - 2) * ((p - 1) * _weight(spec) - p * u)
    return d


def reaction_eval(s, index, spec: ProblemSpec):
    """Reaction value at state s and node index (the index selects a(x) for the logistic case)."""
    p, lam = spec.p, spec.lam
    base = lam * float(flux(s, p))
    if spec.reaction.kind == "logistic":
        return base * (float(spec.reaction.a.values[index]) - s)
    return base


def one_sided_lipschitz_bound(p, lam, a_sup):
    """sup over s >= 0 of d/ds [lam s^{p-1}(a - s)] = lam p s^{p-2}((p-1)/p a - s).

    Infinite for p < 2 with lam a_sup > 0, where the slope blows up at s = 0.
    """
    if lam < 0:
        raise InvalidParameterError("logistic reaction is posed for lambda >= 0")
    if lam == 0 or a_sup <= 0:
        return 0.0
    if p < 2:
        return float("inf")
    top = (p - 1) / p * a_sup
    g = lambda s: -lam * p * s ** (p - 2) * (top - s)
    if p == 2:
        return lam * p * top
    res = optimize.minimize_scalar(g, bounds=(0.0, top), method="bounded", options={"xatol": 1e-13})
    return float(max(-res.fun, 0.0))


# ---------------------------------------------------------------- stepping


def _residual(u, u_prev, dt, rhs_f, spec, eps, free):
    F = u - u_prev - dt * (p_laplacian_values(u, spec.grid, spec.p, eps) + reaction_values(u, spec) + rhs_f)
    F[~free] = 0.0
    return F


def _reaction_variable(spec: ProblemSpec):
    """True when Newton runs in y = |u|^{p-2}u: p < 2 with a reaction, whose slope in u is unbounded at 0."""
    return spec.p < 2 and spec.lam != 0


def _newton_matrix(u, dt, spec, eps, free, y=None):
    """Tridiagonal Jacobian of the step residual, in u or (y given) in y = |u|^{p-2}u."""
    grid = spec.grid
    # solve_banded layout: ab[0, j] = A[j-1, j], ab[1, j] = A[j, j], ab[2, j] = A[j+1, j],
    # so dividing row i by V_i shifts the volume index by one on the off-diagonals
    ab = dt * stiffness_bands(u, grid, spec.p, eps)
    V = grid.volume
    ab[0, 1:] /= V[:-1]
    ab[1, :] /= V
    ab[2, :-1] /= V[1:]
    ab[1] += 1.0
    if y is None:
        ab[1] -= dt * reaction_derivative(u, spec)
    else:
        # chain rule du/dy scales column j; the reaction lam*y is linear in y
        dudy = dflux(y, spec.p / (spec.p - 1))
        ab *= dudy[None, :]
        dr = spec.lam * np.ones_like(u)
        if spec.reaction.kind == "logistic":
            dr = spec.lam * (_weight(spec) - u) - spec.lam * y * dudy
        ab[1] -= dt * dr
    # Dirichlet rows become identity rows decoupled from the free nodes
    for b in np.flatnonzero(~free):
        ab[1, b] = 1.0
        if b + 1 < grid.n:
            ab[0, b + 1] = 0.0
            ab[2, b] = 0.0
        if b - 1 >= 0:
            ab[2, b - 1] = 0.0
            ab[0, b] = 0.0
    return ab


def step_implicit_euler(u_prev: Field, t_next, dt, spec: ProblemSpec):
    """One backward-Euler step; returns (Field, StepReport) or raises StepFailureError.

    Damped Newton on the volume-scaled residual. For p < 2 with a reaction the
    unknown is y = |u|^{p-2}u, in which the reaction is smooth at u = 0.
    """
    if not u_prev.grid.same_as(spec.grid):
        raise IncompatibleFieldsError("previous slice lives on a different grid")
    grid = spec.grid
    free = grid.interior
    eps = spec.eps
    f = spec.source_at(t_next)
    up = u_prev.values
    u = np.array(up, dtype=float)
    bvals = spec.boundary_at(t_next)
    u[~free] = bvals
    transform = _reaction_variable(spec)
    q = spec.p / (spec.p - 1) if transform else None
    x = flux(u, spec.p) if transform else u

    def to_u(x):
        if not transform:
            return x
        out = flux(x, q)
        out[~free] = bvals
        return out

    F = _residual(u, up, dt, f, spec, eps, free)
    res = float(np.max(np.abs(F)))
    damped = False
    it = 0
    while res > spec.newton_tol:
        if it >= spec.newton_max_iters:
            raise StepFailureError(f"Newton did not converge at t={t_next:.6g}: residual {res:.3e}")
        it += 1
        ab = _newton_matrix(u, dt, spec, eps, free, x if transform else None)
        try:
            dx = solve_banded((1, 1), ab, -F)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise StepFailureError(f"singular Newton system at t={t_next:.6g}: {exc}") from exc
        tau = 1.0
        for _ in range(31):
            xc = x + tau * dx
            cand = to_u(xc)
            Fc = _residual(cand, up, dt, f, spec, eps, free)
            rc = float(np.max(np.abs(Fc)))
            if np.isfinite(rc) and rc < res:
                break
            tau *= 0.5
        else:
            raise StepFailureError(f"line search failed at t={t_next:.6g}: residual {res:.3e}")
        damped = damped or tau < 1.0
        x, u, F, res = xc, cand, Fc, rc
    return Field(grid, u), StepReport(max(it, 1), res, damped)


def _substep(u: Field, t0, dt, spec, pieces):
    iters, damped, res = 0, False, 0.0
    h = dt / pieces
    for j in range(pieces):
        u, rep = step_implicit_euler(u, t0 + (j + 1) * h, h, spec)
        iters += rep.newton_iters
        damped = damped or rep.damped
        res = rep.final_residual
    return u, StepReport(iters, res, damped, pieces)


def solve_parabolic(spec: ProblemSpec, tmesh: TimeMesh, max_retries=4) -> SpaceTimeField:
    """March from spec.initial over tmesh; a failed step is retried with dt halved up to max_retries times."""
    if spec.reaction.kind == "logistic" and spec.p <= 2:
        warnings.warn("logistic reaction is framed for p > 2; one-sided Lipschitz bound is infinite", stacklevel=2)
    grid = spec.grid
    out = np.empty((tmesh.mT + 1, grid.n))
    out[0] = spec.initial.values
    reports = []
    dt = tmesh.dt
    times = tmesh.times
    for k in range(1, tmesh.mT + 1):
        for attempt in range(max_retries + 1):
            try:
                u, rep = _substep(Field(grid, out[k - 1]), times[k - 1], dt, spec, 2**attempt)
                break
            except StepFailureError as exc:
                last = exc
        else:
            raise StepFailureError(f"step {k} failed after {max_retries} dt halvings: {last}", time_index=k)
        out[k] = u.values
        reports.append(rep)
    return SpaceTimeField(grid, tmesh, out, tuple(reports))


# ---------------------------------------------------------------- residual certification


def residual_field(stf: SpaceTimeField, spec: ProblemSpec, eps_reg=0.0) -> SpaceTimeField:
    """Pointwise residual du/dt - Delta_p u - r(u) - f with centred time differences.

    Interior nodes at interior times only; boundary nodes and the first and
    last slices are zero. The diffusion uses eps_reg (exact operator by default).
    """
    if stf.tmesh.mT < 2:
        raise IncompatibleFieldsError("need at least three slices")
    if not stf.grid.same_as(spec.grid):
        raise IncompatibleFieldsError("solution and problem live on different grids")
    grid = stf.grid
    U = stf.values
    dt = stf.dt
    times = stf.times
    out = np.zeros_like(U)
    free = grid.interior
    for k in range(1, stf.tmesh.mT):
        u = U[k]
        r = (U[k + 1] - U[k - 1]) / (2 * dt)
        r -= p_laplacian_values(u, grid, spec.p, eps_reg)
        r -= reaction_values(u, spec)
        r -= spec.source_at(times[k])
        r[~free] = 0.0
        out[k] = r
    return SpaceTimeField(grid, stf.tmesh, out)
