"""Discrete p-Laplacian, the energy functional, eigenvalues and the elliptic constructions.

The operator is written in conservative control-volume form

    (Delta_p u)_i = (A_{i+1/2} q_{i+1/2} - A_{i-1/2} q_{i-1/2}) / V_i,
    q_{i+1/2} = (D^2 + eps^2)^{(p-2)/2} D,   D = (u_{i+1} - u_i) / h,

with A and V taken from the grid. On an interval A = 1 and V is the trapezoid
weight; on a radial grid A = |S^{N-1}| r^{N-1} at the faces and node 0 is a
symmetry node. With this choice the discrete energy below has the operator as
its exact gradient in the V-weighted inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal, solve_banded, solveh_banded

from .closed_forms import lambda1_interval
from .errors import (
    BracketingError,
    ConvergenceError,
    IncompatibleFieldsError,
    InvalidParameterError,
    SingularFluxError,
    TrivialSolutionError,
)
from .grid import INTERVAL, Field, Grid, build_grid, sup_norm

# ---------------------------------------------------------------- flux and operator


def flux(s, p, eps=0.0):
    """q(s) = (s^2 + eps^2)^{(p-2)/2} s. At eps = 0 this is sign(s)|s|^{p-1}, continuous for p > 1."""
    s = np.asarray(s, dtype=float)
    if eps == 0.0:
        return np.sign(s) * np.abs(s) ** (p - 1)
    return (s * s + eps * eps) ** ((p - 2) / 2) * s


def dflux(s, p, eps=0.0):
    """dq/ds = (s^2 + eps^2)^{(p-4)/2} ((p-1)s^2 + eps^2)."""
    s = np.asarray(s, dtype=float)
    if eps == 0.0:
        if p < 2 and np.any(s == 0):
            raise SingularFluxError(
                "flux derivative is infinite at zero gradient for p < 2; use eps_reg > 0"
            )
        with np.errstate(divide="ignore"):
            return (p - 1) * np.abs(s) ** (p - 2)
    return (s * s + eps * eps) ** ((p - 4) / 2) * ((p - 1) * s * s + eps * eps)


def _check_p(p):
    if not p > 1:
        raise InvalidParameterError(f"p must exceed 1, got {p}")


def p_laplacian_values(values, grid: Grid, p, eps=0.0):
    """Array version of discrete_p_laplacian. Boundary entries are zero."""
    D = np.diff(values) / grid.h
    Aq = grid.face_area * flux(D, p, eps)
    out = np.zeros(grid.n)
    div = np.empty(grid.n)
    div[1:-1] = Aq[1:] - Aq[:-1]
    div[0] = Aq[0]
    div[-1] = -Aq[-1]
    out[grid.interior] = (div / grid.volume)[grid.interior]
    return out


def discrete_p_laplacian(u: Field, p, eps_reg=0.0) -> Field:
    _check_p(p)
    if eps_reg < 0:
        raise InvalidParameterError("eps_reg must be nonnegative")
    return Field(u.grid, p_laplacian_values(u.values, u.grid, p, eps_reg))


def stiffness_bands(values, grid: Grid, p, eps):
    """Banded Jacobian of -V * Delta_p (symmetric, tridiagonal), in solve_banded (3, n) layout.

    Rows of boundary nodes are left zero; callers impose Dirichlet rows.
    """
    D = np.diff(values) / grid.h
    c = grid.face_area * dflux(D, p, eps) / grid.h
    ab = np.zeros((3, grid.n))
    ab[1, :-1] += c
    ab[1, 1:] += c
    ab[0, 1:] = -c
    ab[2, :-1] = -c
    return ab


# ---------------------------------------------------------------- energy


@dataclass(frozen=True, eq=False)
class EnergySpec:
    p: float
    lam: float
    h_src: Field

    def __post_init__(self):
        _check_p(self.p)


def inner(u, v, grid: Grid):
    """V-weighted discrete L2 product of two arrays or fields."""
    u = getattr(u, "values", u)
    v = getattr(v, "values", v)
    return float(np.sum(grid.volume * u * v))


def _check_grid(w: Field, spec: EnergySpec):
    if not w.grid.same_as(spec.h_src.grid):
        raise IncompatibleFieldsError("field and source live on different grids")


def _energy_values(w, grid, p, lam, h):
    D = np.diff(w) / grid.h
    V = grid.volume
    aw = np.abs(w)
    return (
        np.sum(grid.face_area * grid.h * np.abs(D) ** p) / p
        - lam / p * np.sum(V * aw**p)
        + 0.5 * np.sum(V * w * w)
        - np.sum(V * h * w)
    )


def _gradient_values(w, grid, p, lam, h):
    g = -p_laplacian_values(w, grid, p) - lam * flux(w, p) + w - h
    g[~grid.interior] = 0.0
    return g


def energy(w: Field, spec: EnergySpec) -> float:
    """E(w) = (1/p)int|w'|^p - (lam/p)int|w|^p + (1/2)int w^2 - int h w."""
    _check_grid(w, spec)
    return float(_energy_values(w.values, w.grid, spec.p, spec.lam, spec.h_src.values))


def energy_gradient(w: Field, spec: EnergySpec) -> Field:
    """Representer of dE in the V-weighted product: -Delta_p w - lam|w|^{p-2}w + w - h, zero on the boundary."""
    _check_grid(w, spec)
    return Field(w.grid, _gradient_values(w.values, w.grid, spec.p, spec.lam, spec.h_src.values))


# ---------------------------------------------------------------- first eigenvalue


def _rayleigh(u, grid, p):
    D = np.diff(u) / grid.h
    return np.sum(grid.face_area * grid.h * np.abs(D) ** p) / np.sum(grid.volume * np.abs(u) ** p)


def _normalize(u, grid, p):
    return u / np.sum(grid.volume * np.abs(u) ** p) ** (1 / p)


def _linear_ground_state(grid: Grid):
    """First eigenvector of the discrete p = 2 problem, positive, on the free nodes."""
    free = grid.interior
    V = grid.volume[free]
    c = grid.face_area / grid.h
    diag = (np.r_[0.0, c] + np.r_[c, 0.0])[free]
    off = -c[: grid.n - 1]
    off = off[free[:-1] & free[1:]]
    s = 1 / np.sqrt(V)
    d = diag * s * s
    e = off * s[:-1] * s[1:]
    _, vec = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    u = np.zeros(grid.n)
    u[free] = np.abs(vec[:, 0]) * s
    return u


def _solve_free(ab, rhs, free):
    """Solve a tridiagonal system restricted to the free (non-Dirichlet) nodes."""
    idx = np.flatnonzero(free)
    sub = ab[:, idx[0] : idx[-1] + 1]
    x = np.zeros(len(rhs))
    x[idx] = solve_banded((1, 1), sub, rhs[idx])
    return x


def lambda1_rayleigh(grid: Grid, p, tol=1e-10, max_iter=5000):
    """First Dirichlet eigenvalue from the Rayleigh quotient int|u'|^p / int|u|^p.

    Projected descent preconditioned by the frozen-coefficient stiffness
    (a nonlinear inverse iteration), renormalized to int|u|^p = 1 and
    started from the discrete p = 2 ground state. Returns (lambda1, u).
    """
    _check_p(p)
    free = grid.interior
    u = _normalize(_linear_ground_state(grid), grid, p)
    R = _rayleigh(u, grid, p)
    for it in range(max_iter):
        D = np.diff(u) / grid.h
        delta = 1e-8 * np.max(np.abs(D))
        c = grid.face_area * (D * D + delta * delta) ** ((p - 2) / 2) / grid.h
        ab = np.zeros((3, grid.n))
        ab[1, :-1] += c
        ab[1, 1:] += c
        ab[0, 1:] = -c
        ab[2, :-1] = -c
        y = _solve_free(ab, R * grid.volume * flux(u, p), free)
        y = _normalize(y, grid, p)
        tau = 1.0
        while True:
            cand = _normalize((1 - tau) * u + tau * y, grid, p)
            Rc = _rayleigh(cand, grid, p)
            if Rc <= R * (1 + 1e-15) or tau < 1e-6:
                break
            tau *= 0.5
        change = abs(R - Rc)
        u, R = cand, Rc
        if change <= tol * R and np.max(np.abs(y - u)) < math.sqrt(tol):
            return float(R), Field(grid, np.abs(u))
    raise ConvergenceError(f"Rayleigh iteration did not converge in {max_iter} steps", Field(grid, u))


def _eigen_rhs(lam, p):
    r = 1 / (p - 1)

    def rhs(x, y):
        v, q = y
        return [math.copysign(abs(q) ** r, q), -lam * math.copysign(abs(v) ** (p - 1), v)]

    return rhs


def _first_zero(p, lam, x_max, source):
    """Distance from the symmetric maximum (v=1, v'=0) to the first zero of v."""
    x0 = 1e-7 * min(x_max, 1.0)
    if source == "eigen":
        rhs = _eigen_rhs(lam, p)
        y0 = [1 - (p - 1) / p * lam ** (1 / (p - 1)) * x0 ** (p / (p - 1)), -lam * x0]
    else:
        rhs = _profile_rhs(p)
        y0 = [lam - (p - 1) / p * lam ** (1 / (p - 1)) * x0 ** (p / (p - 1)), -lam * x0]

    def hit(x, y):
        return y[0]

    hit.terminal = True
    hit.direction = -1
    sol = solve_ivp(rhs, (x0, x_max), y0, method="DOP853", events=hit, rtol=1e-12, atol=1e-14)
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return math.inf


def lambda1_shooting(p, L, xtol=1e-10):
    """First eigenvalue of -(|v'|^{p-2}v')' = lam|v|^{p-2}v on an interval of length L.

    Shoots from the midpoint with v = 1, v' = 0 and bisects lam until the first
    zero lands at distance L/2.
    """
    _check_p(p)
    if not L > 0:
        raise InvalidParameterError("interval length must be positive")
    half = L / 2

    def miss(lam):
        return _first_zero(p, lam, 4 * half, "eigen") - half

    lo, hi = 1.0, 1.0
    for _ in range(200):
        if miss(lo) > 0:
            break
        lo *= 0.5
    else:
        raise BracketingError("no eigenvalue bracket from below")
    for _ in range(200):
        if miss(hi) < 0:
            break
        hi *= 2.0
    else:
        raise BracketingError("no eigenvalue bracket from above")
    return float(optimize.bisect(miss, lo, hi, xtol=xtol * max(1.0, lo), rtol=1e-15, maxiter=500))


# ---------------------------------------------------------------- extinction profile


def _profile_rhs(p):
    r = 1 / (p - 1)

    def rhs(x, y):
        v, q = y
        return [math.copysign(abs(q) ** r, q), -v]

    return rhs


def profile_amplitude(p):
    """Centre value s of the positive solution of -(|v'|^{p-2}v')' = v, v(+-1) = 0.

    Substituting v = s V(x / s^{(p-2)/p}) shows the first zero X(s) of the
    shot from v(0) = s scales like s^{-(2-p)/p}; one shot from s = 1 gives a
    bracket and brentq refines the root of X(s) = 1.
    """
    if not 1 < p < 2:
        raise InvalidParameterError(f"profile problem needs p in (1,2), got {p}")
    X1 = _first_zero(p, 1.0, 100.0, "profile")
    guess = X1 ** (p / (2 - p))
    f = lambda s: _first_zero(p, s, 10.0, "profile") - 1.0
    lo, hi = 0.5 * guess, 2.0 * guess
    if not f(lo) > 0 > f(hi):
        raise BracketingError(f"no sign change of v(1; s) on [{lo}, {hi}]")
    return float(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15))


def solve_profile_bvp(p, n) -> Field:
    """Even positive profile of -(|v'|^{p-2}v')' = v on (-1, 1) with zero boundary values."""
    s = profile_amplitude(p)
    grid = build_grid(INTERVAL, n, a=-1.0, b=1.0)
    r = np.abs(grid.nodes)
    x0 = 1e-7
    y0 = [s - (p - 1) / p * s ** (1 / (p - 1)) * x0 ** (p / (p - 1)), -s * x0]
    sol = solve_ivp(
        _profile_rhs(p), (x0, 1.0), y0, method="DOP853", dense_output=True, rtol=1e-12, atol=1e-14
    )
    v = np.where(r > x0, sol.sol(np.clip(r, x0, 1.0))[0], s)
    return Field(grid, np.maximum(v, 0.0))


# ---------------------------------------------------------------- descent for E_lambda


def _hessian_bands(w, grid, p, lam, convex_only):
    # secant (Kacanov) slope for p < 2 and Newton slope for p > 2: always the larger
    # one, which damps the overshoot Newton suffers on |D|^{p-1} near D = 0
    D = np.diff(w) / grid.h
    Dmax = np.max(np.abs(D))
    delta = max(1e-13 * Dmax, 1e-100) if Dmax > 0 else 1.0
    c = grid.face_area * max(1.0, p - 1) * (D * D + delta * delta) ** ((p - 2) / 2) / grid.h
    ab = np.zeros((3, grid.n))
    ab[1, :-1] += c
    ab[1, 1:] += c
    ab[0, 1:] = -c
    ab[2, :-1] = -c
    aw = np.maximum(np.abs(w), 1e-8 * max(np.max(np.abs(w)), 1e-300))
    curv = lam * (p - 1) * aw ** (p - 2)
    if convex_only:
        curv = np.minimum(curv, 0.0)
    ab[1] += grid.volume * (1.0 - curv)
    return ab


def _spd_solve(ab, rhs, free):
    """Cholesky solve on the free nodes; None if the matrix is not positive definite."""
    idx = np.flatnonzero(free)
    sub = ab[:, idx[0] : idx[-1] + 1]
    upper = np.vstack([sub[0], sub[1]])
    try:
        x = np.zeros(len(rhs))
        x[idx] = solveh_banded(upper, rhs[idx])
        return x
    except np.linalg.LinAlgError:
        return None


def minimize_energy(spec: EnergySpec, grid: Grid, init: Field, tol=1e-6, max_iter=500) -> Field:
    """Local minimizer of E_lambda by a safeguarded Newton descent with Armijo backtracking.

    The Newton direction uses the full Hessian when it is positive definite
    and otherwise falls back to the convex part (diffusion plus mass). Near
    convergence, where energy differences drown in rounding, a step is
    accepted if it lowers the gradient sup-norm.

    For p < 2 the gradient cannot be driven much below sqrt(ulp(w)/h)/h at
    flat points of w, where the flux |D|^{p-1} magnifies rounding in D; the
    default tolerance sits above that floor.
    """
    _check_grid(init, spec)
    if not init.grid.same_as(grid):
        raise IncompatibleFieldsError("initial guess lives on a different grid")
    p, lam, h = spec.p, spec.lam, spec.h_src.values
    free = grid.interior
    V = grid.volume
    w = np.array(init.values, dtype=float)
    w[~free] = 0.0
    E = _energy_values(w, grid, p, lam, h)
    g = _gradient_values(w, grid, p, lam, h)
    for it in range(max_iter):
        gn = np.max(np.abs(g))
        if gn < tol:
            return Field(grid, w)
        d = None
        for convex_only in (False, True):
            d = _spd_solve(_hessian_bands(w, grid, p, lam, convex_only), -V * g, free)
            if d is not None and np.dot(V * g, d) < 0:
                break
            d = None
        if d is None:
            d = -g
        slope = float(np.dot(V * g, d))
        tau = 1.0
        accepted = False
        while tau >= 1e-14:
            wc = w + tau * d
            Ec = _energy_values(wc, grid, p, lam, h)
            if Ec <= E + 1e-4 * tau * slope:
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            # rounding floor: take the largest step that still shrinks the gradient
            tau = 1.0
            while tau >= 1e-14:
                wc = w + tau * d
                gc = _gradient_values(wc, grid, p, lam, h)
                if np.max(np.abs(gc)) < gn:
                    Ec = _energy_values(wc, grid, p, lam, h)
                    accepted = True
                    break
                tau *= 0.5
        if accepted and tau * np.max(np.abs(d)) < 1e-14 * max(1.0, np.max(np.abs(w))):
            accepted = False
        if not accepted and not np.any(h) and np.max(np.abs(w)) < 1e-12:
            # with h = 0 the zero field is an exact critical point; the iterate has collapsed onto it
            return Field(grid, np.zeros(grid.n))
        if not accepted:
            raise ConvergenceError(
                f"descent stalled with gradient sup-norm {gn:.3e} after {it} steps", Field(grid, w)
            )
        w, E = wc, Ec
        g = _gradient_values(w, grid, p, lam, h)
    raise ConvergenceError(f"descent did not converge in {max_iter} steps", Field(grid, w))


def solve_logistic(grid: Grid, p, lam, tol=1e-6) -> Field:
    """Positive solution of -Delta_p w = lam|w|^{p-2}w - w with zero boundary values (needs lam > lambda1)."""
    if not 1 < p < 2:
        raise InvalidParameterError(f"logistic problem is posed for p in (1,2), got {p}")
    lam1, phi = lambda1_rayleigh(grid, p)
    phi = phi.values
    spec = EnergySpec(p, lam, Field(grid, np.zeros(grid.n)))
    # scale c from balancing (lam - lam1) c^{p-1} int phi^p against c^2 int phi^2
    gap = max(lam - lam1, 0.05 * lam1)
    c = (gap / inner(phi, phi, grid)) ** (1 / (2 - p))
    w = minimize_energy(spec, grid, Field(grid, c * phi), tol=tol)
    if sup_norm(w) < 1e-8:
        raise TrivialSolutionError(f"descent collapsed to zero; lambda={lam} is likely <= lambda1={lam1}", w)
    return w


# ---------------------------------------------------------------- saddle construction


@dataclass(frozen=True, eq=False)
class SaddleConstruction:
    m: float
    eps1: float
    eps: float
    w0: Field
    z: Field
    h_src: Field
    x_peak: float = float("nan")
    p: float = float("nan")
    lam: float = float("nan")

    @property
    def energy_spec(self):
        return EnergySpec(self.p, self.lam, self.h_src)

    @property
    def seams(self):
        """Radii where Delta_p w0 is only Holder continuous: the origin, eps1, the annulus peak and 2 eps1."""
        return (0.0, self.eps1, self.x_peak, 2 * self.eps1)

    def seam_mask(self, width):
        """True at nodes farther than width from every seam radius."""
        r = np.abs(self.w0.nodes)
        keep = np.ones(r.shape, dtype=bool)
        for rho in self.seams:
            keep &= np.abs(r - rho) >= width
        return keep


def saddle_exponent(p, N=1):
    """Power m of the core profile |x|^m: large enough for the energy blow-up and for a continuous Delta_p."""
    return max(N / (2 - p), 1 + 1 / (p - 1))


def _smallest_int_above(x, odd=False):
    k = math.floor(x) + 1
    if odd and k % 2 == 0:
        k += 1
    return k


def annulus_profile(p, m, eps1):
    """Polynomial continuation of r^m across the annulus [eps1, 2 eps1].

    In the local variable s = (r - eps1)/eps1 the slope is

        W'(r) = G(s) = -(s - t)^kM (1 - s)^kE S(s),   S quadratic.

    The single interior maximum at s = t is a zero of odd order kM and s = 1 a
    zero of order kE, both with k(p-1) > 1 so that |W'|^{p-2}W' stays C^1
    there. S matches slope and curvature of r^m at eps1 and makes W vanish at
    2 eps1; t is scanned for the most positive S. W is stored as
    (1 - s)^{kE+1} Q(s), which keeps its values exact to rounding near 2 eps1,
    where the singular flux would magnify any residue.

    Returns a dict with callables W(r), G(s), the factors and the peak radius.
    """
    kM = _smallest_int_above(1 / (p - 1), odd=True)
    kE = _smallest_int_above(1 / (p - 1))
    a, L = eps1, eps1
    targets = [m * a ** (m - 1), m * (m - 1) * a ** (m - 2)]
    best = None
    for t in np.linspace(0.02, 0.98, 481):
        base = -Polynomial([-t, 1]) ** kM * Polynomial([1, -1]) ** kE
        cols = [base * Polynomial.basis(j) for j in range(3)]
        M = np.array(
            [
                [c(0.0) for c in cols],
                [c.deriv()(0.0) / L for c in cols],
                [L * c.integ(lbnd=0.0)(1.0) for c in cols],
            ]
        )
        try:
            coef = np.linalg.solve(M, np.array(targets + [-(a**m)]))
        except np.linalg.LinAlgError:
            continue
        S = Polynomial(coef)
        smin = float(np.min(S(np.linspace(0.0, 1.0, 801))))
        if best is None or smin > best[0]:
            best = (smin, t, S)
    if best is None or best[0] <= 0:
        raise InvalidParameterError("no positive annulus continuation found")
    _, t, S = best
    # W(s) = L int_s^1 (u - t)^kM (1 - u)^kE S(u) du = -L P(s) with P(1) = 0
    Pint = (Polynomial([-t, 1]) ** kM * Polynomial([1, -1]) ** kE * S).integ(lbnd=1.0)
    fac = Polynomial([1, -1]) ** (kE + 1)
    Q, _ = divmod(Pint, fac)

    def G(s):
        return -((s - t) ** kM) * (1 - s) ** kE * S(s)

    def W(s):
        return -L * fac(s) * Q(s)

    return {"G": G, "W": W, "S": S, "t": float(t), "kM": kM, "kE": kE, "x_peak": a + t * L}


def _radial_profile(p, m, eps1, N):
    """Closed forms of w0(r) and Delta_p w0(r)."""
    A = annulus_profile(p, m, eps1)
    G, Wann, S, t, kM, kE = A["G"], A["W"], A["S"], A["t"], A["kM"], A["kE"]
    dS = S.deriv()
    a, L, b = eps1, eps1, 2 * eps1

    def W(r):
        r = np.abs(np.asarray(r, dtype=float))
        s = np.clip((r - a) / L, 0.0, 1.0)
        return np.where(r <= a, r**m, np.where(r < b, Wann(s), 0.0))

    def lap(r):
        r = np.abs(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        core = r <= a
        rc = r[core]
        expo = (m - 1) * (p - 1) - 1
        with np.errstate(divide="ignore", invalid="ignore"):
            val = m ** (p - 1) * ((m - 1) * (p - 1) + N - 1) * np.where(rc > 0, rc, 1.0) ** expo
        if expo > 0:
            val = np.where(rc > 0, val, 0.0)
        out[core] = val
        s = (r - a) / L
        ann = (r > a) & (r < b) & (s != t)
        sa, ra = s[ann], r[ann]
        F = flux(G(sa), p)
        # (|W'|^{p-2}W')' = (p-1)|W'|^{p-2}W'' = (p-1) F (W''/W'), with W''/W' from the factored form
        logd = (kM / (sa - t) - kE / (1 - sa) + dS(sa) / S(sa)) / L
        out[ann] = (p - 1) * F * logd + (N - 1) * F / ra
        return out

    return W, lap, A["x_peak"]


def smooth_step(s, delta=0.1):
    """C^2 monotone step from 0 (s <= 0) to 1 (s >= 1): integral of a plateau with cubic shoulders of width delta."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    Q = lambda u: u**3 - u**4 / 2
    edge = delta * Q(1.0)
    out = np.where(
        s < delta,
        delta * Q(s / delta),
        np.where(s <= 1 - delta, edge + (s - delta), 2 * edge + (1 - 2 * delta) - delta * Q((1 - s) / delta)),
    )
    return out / (1 - delta)


def build_saddle_construction(grid: Grid, p, lam, eps=0.05, eps1=0.49) -> SaddleConstruction:
    """Profile w0, direction z and source h for which w0 solves the elliptic problem but is no local minimum.

    w0 = |x|^m on |x| <= eps1 and a polynomial in |x| on the annulus, zero
    beyond 2 eps1; z is a radial C^2 cut-off equal to 1 on |x| <= eps and 0
    beyond eps1; h = -Delta_p w0 - lam|w0|^{p-2}w0 + w0 evaluated in closed form.
    """
    if not 1 < p < 2:
        raise InvalidParameterError(f"construction needs p in (1,2), got {p}")
    if not lam > 0:
        raise InvalidParameterError("construction needs lambda > 0")
    if not 0 < eps < eps1:
        raise InvalidParameterError("need 0 < eps < eps1")
    reach = min(-grid.a, grid.b) if grid.kind == INTERVAL else grid.R
    if not 2 * eps1 < reach:
        raise InvalidParameterError(f"ball of radius 2*eps1={2 * eps1} does not fit in the domain")
    m = saddle_exponent(p, grid.N)
    W, lap, xM = _radial_profile(p, m, eps1, grid.N)
    x = grid.nodes
    w0 = W(x)
    sigma = (x * x - eps * eps) / (eps1 * eps1 - eps * eps)
    z = 1.0 - smooth_step(sigma)
    h = -lap(x) - lam * flux(w0, p) + w0
    w0[~grid.interior] = 0.0
    return SaddleConstruction(
        m, eps1, eps, Field(grid, w0), Field(grid, z), Field(grid, h), float(xM), float(p), float(lam)
    )


def zeta(t, construction: SaddleConstruction, p=None, lam=None):
    """(<E'(w0 + t z), z> - <E'(w0), z>) / t; tends to -infinity as t -> 0+ for the saddle construction."""
    if not t > 0:
        raise InvalidParameterError("t must be positive")
    c = construction
    spec = EnergySpec(c.p if p is None else p, c.lam if lam is None else lam, c.h_src)
    grid = c.w0.grid
    w0, z = c.w0.values, c.z.values
    g1 = _gradient_values(w0 + t * z, grid, spec.p, spec.lam, spec.h_src.values)
    g0 = _gradient_values(w0, grid, spec.p, spec.lam, spec.h_src.values)
    return float(np.sum(grid.volume * (g1 - g0) * z) / t)
