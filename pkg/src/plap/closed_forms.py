"""Explicit solutions, barriers and reference values for the p-Laplace evolution.

All functions accept scalars or numpy arrays for x and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameterError
from .grid import Field


def _norm(x):
    x = np.asarray(x, dtype=float)
    return np.abs(x)


# ---------------------------------------------------------------- Barenblatt


@dataclass(frozen=True)
class BarenblattParams:
    p: float = 3.0
    N: int = 1
    C: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if not self.p > 2:
            raise InvalidParameterError(f"Barenblatt profile needs p > 2, got {self.p}")
        if self.C <= 0 or self.alpha <= 0 or self.N < 1:
            raise InvalidParameterError("need C > 0, alpha > 0, N >= 1")

    @property
    def k(self):
        return 1.0 / (self.p - 2 + self.p / self.N)

    @property
    def _b(self):
        p, N = self.p, self.N
        return (p - 2) / p * (self.k / N) ** (1 / (p - 1))


def barenblatt(x, t, params: BarenblattParams = BarenblattParams()):
    """Self-similar compactly supported solution, shifted in time by alpha."""
    P = params
    p, k, N = P.p, P.k, P.N
    s = t + P.alpha
    xi = _norm(x) / s ** (k / N)
    bracket = np.maximum(P.C - P._b * xi ** (p / (p - 1)), 0.0)
    out = s ** (-k) * bracket ** ((p - 1) / (p - 2))
    return out if np.ndim(out) else float(out)


def barenblatt_support_radius(t, params: BarenblattParams = BarenblattParams()):
    P = params
    p = P.p
    xi = (P.C / P._b) ** ((p - 1) / p)
    return xi * (t + P.alpha) ** (P.k / P.N)


# ---------------------------------------------------------------- extinction


@dataclass(frozen=True, eq=False)
class ExtinctionParams:
    """Separable solution (t0 - (2-p)t)_+^{1/(2-p)} v(x) on (-1, 1).

    ``profile`` samples v on an interval grid over [-1, 1]; off-node values
    are linearly interpolated.
    """

    p: float
    t0: float
    profile: Optional[Field] = None

    def __post_init__(self):
        if not 1 < self.p < 2:
            raise InvalidParameterError(f"extinction profile needs p in (1,2), got {self.p}")
        if not self.t0 > 0:
            raise InvalidParameterError("t0 must be positive")
        if self.profile is not None:
            v = self.profile.values
            if v.min() < -1e-12 or abs(v[0]) > 1e-8 or abs(v[-1]) > 1e-8:
                raise InvalidParameterError("profile must be nonnegative and vanish at +-1")

    @classmethod
    def build(cls, p, t0, n=2049):
        from .elliptic import solve_profile_bvp

        return cls(p, t0, solve_profile_bvp(p, n))

    def v(self, x):
        if self.profile is None:
            raise InvalidParameterError("extinction profile has not been computed")
        return np.interp(x, self.profile.nodes, self.profile.values, left=0.0, right=0.0)


def extinction_time(params: ExtinctionParams):
    return params.t0 / (2 - params.p)


def extinction_amplitude(t, params: ExtinctionParams):
    p = params.p
    return np.maximum(params.t0 - (2 - p) * np.asarray(t, dtype=float), 0.0) ** (1 / (2 - p))


def extinction_solution(x, t, params: ExtinctionParams):
    out = extinction_amplitude(t, params) * params.v(x)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------- Cauchy


def cauchy_solution(t, p):
    """Nontrivial solution of v' = |v|^{p-2}v, v(0) = 0, which exists only for p < 2."""
    if not 1 < p < 2:
        raise InvalidParameterError(f"nontrivial Cauchy branch needs p in (1,2), got {p}")
    t = np.maximum(np.asarray(t, dtype=float), 0.0)
    out = ((2 - p) * t) ** (1 / (2 - p))
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------- barriers


@dataclass(frozen=True)
class BarrierParams:
    eps: float = 1.0
    alpha: float = 1.0
    R: float = 1.0
    x0: tuple = (0.0,)
    t0: float = 0.0

    def __post_init__(self):
        if self.eps <= 0 or self.alpha <= 0 or self.R <= 0:
            raise InvalidParameterError("eps, alpha, R must be positive")
        object.__setattr__(self, "x0", tuple(np.atleast_1d(np.asarray(self.x0, dtype=float))))


def _parabolic_dist2(x, t, P):
    # one-dimensional centres take plain positions; otherwise points lie along the last axis
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(P.x0)
    if x0.size == 1:
        dx2 = (x - x0[0]) ** 2
    else:
        dx2 = np.sum((x - x0) ** 2, axis=-1)
    return dx2 + np.abs(np.asarray(t, dtype=float) - P.t0)


def hopf_barrier(x, t, params: BarrierParams = BarrierParams()):
    """eps(exp(-alpha d^2) - exp(-alpha R^2)) with d^2 = |x-x0|^2 + |t-t0|."""
    P = params
    d2 = _parabolic_dist2(x, t, P)
    out = P.eps * (np.exp(-P.alpha * d2) - np.exp(-P.alpha * P.R**2))
    return out if np.ndim(out) else float(out)


def hopf_barrier_grad(x, t, params: BarrierParams = BarrierParams()):
    """Spatial gradient of hopf_barrier."""
    P = params
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(P.x0)
    d2 = _parabolic_dist2(x, t, P)
    if x0.size == 1:
        return -2 * P.alpha * P.eps * np.exp(-P.alpha * d2) * (x - x0[0])
    return -2 * P.alpha * P.eps * np.exp(-P.alpha * d2)[..., None] * (x - x0)


@dataclass(frozen=True)
class SubsolutionParams:
    C: float = 0.1
    m: float = 3.0
    R: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if self.C <= 0 or self.R <= 0 or self.T <= 0:
            raise InvalidParameterError("C, R, T must be positive")


def admissible_m(p):
    """Smallest exponent m for which the subsolution works at this p > 2."""
    if not p > 2:
        raise InvalidParameterError(f"need p > 2, got {p}")
    return p / (p - 2)


def degenerate_subsolution(x, t, params: SubsolutionParams = SubsolutionParams()):
    P = params
    # x holds signed positions or radii; for points in R^N pass np.linalg.norm(x, axis=-1)
    r2 = np.asarray(x, dtype=float) ** 2
    out = P.C * np.maximum(P.R**2 - r2, 0.0) ** P.m * (P.T - np.asarray(t, dtype=float))
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------- eigenvalue reference


def pi_p(p):
    if not p > 1:
        raise InvalidParameterError(f"need p > 1, got {p}")
    return 2 * math.pi / (p * math.sin(math.pi / p))


def lambda1_interval(p, L):
    """First Dirichlet eigenvalue of the one-dimensional p-Laplacian on an interval of length L."""
    if not L > 0:
        raise InvalidParameterError("interval length must be positive")
    return (p - 1) * (pi_p(p) / L) ** p
