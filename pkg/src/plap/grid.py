"""Uniform grids, nodal fields, problem records and their CSV form.

Two geometries are supported: an interval [a, b] and a radial ball of radius R
in dimension N, discretized in r on [0, R]. Both carry a finite-volume view
(face areas and cell volumes) so the p-Laplacian and all quadratures share
one set of weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    IncompatibleFieldsError,
    InvalidGeometryError,
    InvalidParameterError,
    NonFiniteValueError,
)

INTERVAL = "interval"
RADIAL = "radial-ball"


def _sphere_area(N):
    # surface measure of the unit sphere in R^N; the two endpoints when N = 1
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


@dataclass(frozen=True)
class Grid:
    kind: str
    n: int
    a: float = 0.0
    b: float = 1.0
    N: int = 1

    @property
    def R(self):
        return self.b

    @property
    def h(self):
        return (self.b - self.a) / (self.n - 1)

    @property
    def length(self):
        return self.b - self.a

    @cached_property
    def nodes(self):
        x = np.linspace(self.a, self.b, self.n)
        x.flags.writeable = False
        return x

    @property
    def radial(self):
        return self.kind == RADIAL

    @cached_property
    def boundary(self):
        """Indices of Dirichlet nodes. The radial centre is a symmetry node."""
        return (self.n - 1,) if self.radial else (0, self.n - 1)

    @cached_property
    def interior(self):
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.boundary)] = False
        mask.flags.writeable = False
        return mask

    @cached_property
    def face_area(self):
        """Weights A_{i+1/2} multiplying the flux on the n-1 cell faces."""
        if not self.radial:
            A = np.ones(self.n - 1)
        else:
            rf = 0.5 * (self.nodes[1:] + self.nodes[:-1])
            A = _sphere_area(self.N) * rf ** (self.N - 1)
        A.flags.writeable = False
        return A

    @cached_property
    def volume(self):
        """Control-volume measures; they sum to |Omega| and serve as quadrature weights."""
        h = self.h
        if not self.radial:
            V = np.full(self.n, h)
            V[0] = V[-1] = 0.5 * h
        else:
            N = self.N
            edges = np.concatenate(([0.0], 0.5 * (self.nodes[1:] + self.nodes[:-1]), [self.b]))
            V = _sphere_area(N) / N * (edges[1:] ** N - edges[:-1] ** N)
        V.flags.writeable = False
        return V

    def same_as(self, other):
        return (
            self.kind == other.kind
            and self.n == other.n
            and self.N == other.N
            and self.a == other.a
            and self.b == other.b
        )


def build_grid(kind: str, n: int, *, a=None, b=None, R=None, N: int = 1) -> Grid:
    """Uniform grid on an interval [a, b] or on the radial segment [0, R] of a ball in R^N."""
    if int(n) != n or n < 3:
        raise InvalidGeometryError(f"need n >= 3 nodes, got {n}")
    n = int(n)
    if kind in ("interval", INTERVAL):
        if a is None or b is None:
            raise InvalidGeometryError("interval grid needs a and b")
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b)) or b - a <= 0:
            raise InvalidGeometryError(f"non-positive length: [{a}, {b}]")
        return Grid(INTERVAL, n, a, b, 1)
    if kind in ("radial", RADIAL, "ball"):
        if R is None or not math.isfinite(R) or R <= 0:
            raise InvalidGeometryError(f"ball radius must be positive, got {R}")
        if int(N) != N or N < 1:
            raise InvalidGeometryError(f"dimension must be a positive integer, got {N}")
        return Grid(RADIAL, n, 0.0, float(R), int(N))
    raise InvalidGeometryError(f"unknown grid kind {kind!r}")


@dataclass(frozen=True)
class TimeMesh:
    T: float
    mT: int

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise InvalidGeometryError(f"final time must be positive, got {self.T}")
        if int(self.mT) != self.mT or self.mT < 1:
            raise InvalidGeometryError(f"step count must be a positive integer, got {self.mT}")
        object.__setattr__(self, "mT", int(self.mT))

    @property
    def dt(self):
        return self.T / self.mT

    @cached_property
    def times(self):
        t = self.dt * np.arange(self.mT + 1)
        t[-1] = self.T
        t.flags.writeable = False
        return t

    def same_as(self, other):
        return self.T == other.T and self.mT == other.mT


def _frozen(values):
    v = np.array(values, dtype=float)
    v.flags.writeable = False
    return v


def _check_finite(values):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = np.argwhere(bad)[0]
        idx = tuple(int(i) for i in idx) if len(idx) > 1 else int(idx[0])
        raise NonFiniteValueError(idx, values[idx])


@dataclass(frozen=True, eq=False)
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.grid.n,):
            raise IncompatibleFieldsError(f"expected {self.grid.n} values, got shape {v.shape}")
        _check_finite(v)
        object.__setattr__(self, "values", v)

    @property
    def nodes(self):
        return self.grid.nodes

    def __len__(self):
        return self.grid.n

    def with_values(self, values):
        return Field(self.grid, values)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Nodal values on every time level; row k is the slice at t_k."""

    grid: Grid
    tmesh: TimeMesh
    values: np.ndarray
    reports: tuple = ()

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.tmesh.mT + 1, self.grid.n):
            raise IncompatibleFieldsError(
                f"expected shape {(self.tmesh.mT + 1, self.grid.n)}, got {v.shape}"
            )
        _check_finite(v)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "reports", tuple(self.reports))

    @property
    def times(self):
        return self.tmesh.times

    @property
    def dt(self):
        return self.tmesh.dt

    def slice(self, k) -> Field:
        return Field(self.grid, self.values[k])

    @property
    def slices(self):
        return tuple(self.slice(k) for k in range(self.tmesh.mT + 1))

    @property
    def initial(self) -> Field:
        return self.slice(0)

    @property
    def final(self) -> Field:
        return self.slice(-1)


@dataclass(frozen=True)
class Reaction:
    """Zero-order term: 'power' is lam|u|^{p-2}u, 'logistic' is lam|u|^{p-2}u(a(x) - u)."""

    kind: str = "power"
    a: Optional[Field] = None

    def __post_init__(self):
        if self.kind not in ("power", "logistic"):
            raise InvalidParameterError(f"unknown reaction kind {self.kind!r}")
        if self.kind == "logistic" and self.a is None:
            raise InvalidParameterError("logistic reaction needs a weight field a(x)")


SourceFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    p: float
    lam: float
    grid: Grid
    initial: Field
    source: Optional[SourceFn] = None
    boundary: Union[str, SourceFn] = "zero"
    reaction: Reaction = field(default_factory=Reaction)
    eps_reg: Optional[float] = None
    newton_tol: float = 1e-10
    newton_max_iters: int = 50

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidParameterError(f"p must exceed 1, got {self.p}")
        if self.eps_reg is not None and self.eps_reg < 0:
            raise InvalidParameterError("eps_reg must be nonnegative")
        if not self.newton_tol > 0:
            raise InvalidParameterError("newton_tol must be positive")
        if self.boundary != "zero" and not callable(self.boundary):
            raise InvalidParameterError("boundary must be 'zero' or a callable h(x, t)")
        if not self.initial.grid.same_as(self.grid):
            raise IncompatibleFieldsError("initial datum lives on a different grid")
        if self.reaction.kind == "logistic":
            if self.lam < 0:
                raise InvalidParameterError("logistic reaction needs lambda >= 0")
            if not self.reaction.a.grid.same_as(self.grid):
                raise IncompatibleFieldsError("logistic weight lives on a different grid")

    @property
    def eps(self):
        """Effective flux regularization; defaults to the grid spacing."""
        return self.grid.h if self.eps_reg is None else float(self.eps_reg)

    def source_at(self, t):
        if self.source is None:
            return np.zeros(self.grid.n)
        return np.broadcast_to(np.asarray(self.source(self.grid.nodes, t), dtype=float), (self.grid.n,))

    def boundary_at(self, t):
        """Dirichlet values at the boundary nodes, in grid.boundary order."""
        idx = list(self.grid.boundary)
        if self.boundary == "zero":
            return np.zeros(len(idx))
        return np.broadcast_to(np.asarray(self.boundary(self.grid.nodes[idx], t), dtype=float), (len(idx),))


def sample(grid: Grid, fn) -> Field:
    """Evaluate fn at every node. Vectorized callables are used as-is."""
    x = grid.nodes
    with np.errstate(all="ignore"):
        try:
            vals = np.asarray(fn(x), dtype=float)
            if vals.shape != x.shape:
                vals = np.broadcast_to(vals, x.shape).copy() if vals.ndim == 0 else None
        except (TypeError, ValueError, ZeroDivisionError):
            vals = None
        if vals is None:
            vals = np.empty(grid.n)
            for i, xi in enumerate(x):
                try:
                    vals[i] = fn(float(xi))
                except (ZeroDivisionError, OverflowError, ValueError):
                    vals[i] = np.nan
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        raise NonFiniteValueError(int(bad[0]), vals[bad[0]])
    return Field(grid, vals)


def zeros(grid: Grid) -> Field:
    return Field(grid, np.zeros(grid.n))


def sup_norm(u: Field) -> float:
    return float(np.max(np.abs(u.values))) if u.values.size else 0.0


def sup_diff(u: Field, v: Field) -> float:
    if not u.grid.same_as(v.grid):
        raise IncompatibleFieldsError("fields live on different grids")
    return float(np.max(np.abs(u.values - v.values)))


def stack(grid: Grid, tmesh: TimeMesh, fn) -> SpaceTimeField:
    """Sample fn(x, t) on every node and time level."""
    rows = np.empty((tmesh.mT + 1, grid.n))
    with np.errstate(all="ignore"):
        for k, t in enumerate(tmesh.times):
            rows[k] = fn(grid.nodes, float(t))
    return SpaceTimeField(grid, tmesh, rows)


# ---------------------------------------------------------------- CSV

_FMT = "%.17g"


def write_field_csv(u: Field, path) -> str:
    data = np.column_stack([u.nodes, u.values])
    np.savetxt(path, data, fmt=_FMT, delimiter=",", header="x,value", comments="", newline="\n")
    return str(path)


def write_stf_csv(u: SpaceTimeField, path, time_stride: int = 1) -> str:
    """One row per node per slice. time_stride > 1 thins the slices (final slice always kept)."""
    ks = list(range(0, u.tmesh.mT + 1, time_stride))
    if ks[-1] != u.tmesh.mT:
        ks.append(u.tmesh.mT)
    n = u.grid.n
    t = np.repeat(u.times[ks], n)
    x = np.tile(u.grid.nodes, len(ks))
    data = np.column_stack([t, x, u.values[ks].ravel()])
    np.savetxt(path, data, fmt=_FMT, delimiter=",", header="t,x,value", comments="", newline="\n")
    return str(path)


def _grid_from_nodes(x, kind, N):
    if kind == RADIAL:
        return build_grid(RADIAL, len(x), R=float(x[-1]), N=N)
    return build_grid(INTERVAL, len(x), a=float(x[0]), b=float(x[-1]))


def read_field_csv(path, kind: str = INTERVAL, N: int = 1) -> Field:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    grid = _grid_from_nodes(data[:, 0], kind, N)
    return Field(grid, data[:, 1])


def read_stf_csv(path, kind: str = INTERVAL, N: int = 1) -> SpaceTimeField:
    """Inverse of write_stf_csv for files written with unit stride."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = data[:, 0]
    n = int(np.count_nonzero(t == t[0]))
    if data.shape[0] % n:
        raise IncompatibleFieldsError("rows do not form complete slices")
    rows = data[:, 2].reshape(-1, n)
    times = t[::n]
    grid = _grid_from_nodes(data[:n, 1], kind, N)
    mT = rows.shape[0] - 1
    if mT < 1:
        raise IncompatibleFieldsError("need at least two time levels")
    tmesh = TimeMesh(float(times[-1] - times[0]), mT)
    return SpaceTimeField(grid, tmesh, rows)
