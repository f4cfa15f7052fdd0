"""Two ways to lose uniqueness when p < 2 and lambda > 0.

The reaction lambda |u|^{p-2} u is not Lipschitz at zero, so zero data can
leave along the branch v(t) = ((2-p) t)^{1/(2-p)}.

1. Above the first eigenvalue the logistic elliptic problem
   -Delta_p w = lambda |w|^{p-2} w - w has a positive solution w. Since
   v' = v^{p-1}, the fields 0, w v(t) and -w v(t) all solve the evolution
   problem with zero data and zero source. The negative one breaks the weak
   maximum principle.
2. Below the first eigenvalue: a source h is built so that w0 is a critical
   point but not a minimizer of the energy; the minimizer w1 gives a second
   solution w1 v(t) for the same source h v(t)^{p-1}.
"""

import numpy as np

from plap import closed_forms as cf
from plap import elliptic as el
from plap.grid import INTERVAL, ProblemSpec, TimeMesh, build_grid, stack, sup_diff, zeros
from plap.parabolic import residual_field
from plap.principles import check_wmp

p = 1.5
grid = build_grid(INTERVAL, 2049, a=-1.0, b=1.0)
tm = TimeMesh(1.0, 100)
v = lambda t: cf.cauchy_solution(t, p)
lam1 = el.lambda1_shooting(p, 2.0)
print(f"first eigenvalue on (-1, 1): {lam1:.6f}")

# -- logistic profile at twice the first eigenvalue
lam = 2 * lam1
w = el.solve_logistic(grid, p, lam)
spec = ProblemSpec(p, lam, grid, zeros(grid))
for sign in (0, 1, -1):
    u = stack(grid, tm, lambda x, t: sign * w.values * v(t))
    res = np.max(np.abs(residual_field(u, spec).values))
    print(f"  {sign:+d} w v(t): residual {res:.2e}, WMP {check_wmp(u).verdict}")

# -- saddle construction below the first eigenvalue
lam = 1.0
grid = build_grid(INTERVAL, 4097, a=-1.0, b=1.0)
c = el.build_saddle_construction(grid, p, lam)
espec = c.energy_spec
w1 = el.minimize_energy(espec, grid, zeros(grid))
print()
print(f"energy at w0: {el.energy(c.w0, espec):.6f}, at w1: {el.energy(w1, espec):.6f}")
print(f"energy along w0 + 1e-3 z drops by {el.energy(c.w0.with_values(c.w0.values + 1e-3 * c.z.values), espec) - el.energy(c.w0, espec):.2e}")
print(f"zeta(1e-3) = {el.zeta(1e-3, c):.4f}")
hv = c.h_src.values
spec = ProblemSpec(p, lam, grid, zeros(grid), source=lambda x, t: hv * v(t) ** (p - 1))
for name, base in (("w0", c.w0), ("w1", w1)):
    u = stack(grid, TimeMesh(1.0, 50), lambda x, t: base.values * v(t))
    r = np.abs(residual_field(u, spec).values)
    print(f"  {name} v(t): residual off the seams {r[:, c.seam_mask(0.02)].max():.2e}, everywhere {r.max():.2e}")
print(f"sup |w0 - w1| v(1) = {sup_diff(c.w0, w1) * v(1.0):.4f}")
print("(the residual of w0 v(t) keeps a fixed value at x = 0, where w0 ~ |x|^3 and the")
print(" two-point flux is off by a constant factor; it does not shrink with h)")
