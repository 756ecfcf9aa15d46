"""Random instance generators and per-instance checks shared by the unit and acceptance suites.

Each check returns (holds, detail). DP values overestimate W, so only the W
terms on the smaller side of an inequality need the two-resolution slack.
"""

import math

import numpy as np

from bootperc.analytic import g, g_integral
from bootperc.variational import W_corner, W_dp, W_estimate, staircase, vsplit_s, upper_bound_axis, w

GRID = 32

# criterion number -> PASS/FAIL line, filled by the acceptance suite
ACCEPTANCE_LINES = {}


def _pt(rng, lo=0.05, hi=2.5):
    return tuple(rng.uniform(lo, hi, 2))


def _sorted_triple(rng):
    a = np.array(_pt(rng, 0.05, 1.5))
    b = a + rng.uniform(0, 1.2, 2)
    c = b + rng.uniform(0, 1.2, 2)
    return tuple(a), tuple(b), tuple(c)


def check_triangle(rng):
    a, b, c = _sorted_triple(rng)
    lhs = W_dp(a, b, 2 * GRID) + W_dp(b, c, 2 * GRID)
    est = W_estimate(a, c, GRID)
    return lhs >= est.value - est.eps_grid, (a, b, c, lhs, est)


def check_axis_bound(rng):
    a, b, _ = _sorted_triple(rng)
    v = W_dp(a, b, 2 * GRID)
    return v <= upper_bound_axis(a, b) * (1 + 1e-12) + 1e-15, (a, b, v)


def check_diagonal_bound(rng):
    a = _pt(rng, 0.05, 1.5)
    A = a[0] + a[1]
    B = A + rng.uniform(0, 2.0)
    corner = W_corner(a, B)
    exact = 2 * g_integral(A, B)
    est = W_estimate(a, (B, B), GRID)
    ok = (corner >= exact - 1e-10 and est.value >= exact - 1e-10
          and corner <= est.value + 1e-9 and est.value - corner <= est.eps_grid + 1e-9)
    return ok, (a, B, corner, exact, est)


def random_split_instance(rng, q=0.02, Z=0.1):
    while True:
        a = np.array(_pt(rng, 0.05, 1.0))
        b = a + rng.uniform(0, 1.0, 2)
        c = np.array(_pt(rng, 0.05, 1.0))
        d = c + rng.uniform(0, 1.0, 2)
        lo = np.maximum(np.maximum(b, d), 2 * Z)
        hi = b + d + q
        if np.all(lo <= hi):
            r = lo + rng.uniform(0, 1, 2) * (hi - lo)
            return tuple(a), tuple(b), tuple(c), tuple(d), tuple(r)


def check_split(rng, q=0.02, Z=0.1):
    a, b, c, d, r = random_split_instance(rng, q, Z)
    s = vsplit_s(a, b, c, d, r)
    if not (s <= r and s <= (a[0] + c[0], a[1] + c[1])):
        return False, (a, b, c, d, r, s)
    lhs = W_dp(a, b, 2 * GRID) + W_dp(c, d, 2 * GRID)
    est = W_estimate(s, r, GRID)
    return lhs >= est.value - 2 * q * g(Z) - est.eps_grid, (a, b, c, d, r, s, lhs, est)


def check_shift(rng):
    a, b, _ = _sorted_triple(rng)
    k = tuple(rng.uniform(0, 1.5, 2))
    lhs = W_dp(a, b, 2 * GRID)
    est = W_estimate((a[0] + k[0], a[1] + k[1]), (b[0] + k[0], b[1] + k[1]), GRID)
    return lhs >= est.value - est.eps_grid, (a, b, k, lhs, est)


def check_start_monotone(rng):
    a, b, c = _sorted_triple(rng)
    lhs = W_dp(a, c, 2 * GRID)
    est = W_estimate(b, c, GRID)
    return lhs >= est.value - est.eps_grid, (a, b, c, lhs, est)


def random_dyck(rng, n):
    """Steps (0 east, 1 north) of length 2n never dipping below the diagonal."""
    steps, height = [], 0
    ups = downs = 0
    for _ in range(2 * n):
        can_up = ups < n
        can_down = downs < ups
        up = can_up and (not can_down or rng.random() < 0.5)
        steps.append(1 if up else 0)
        ups += up
        downs += not up
    return steps


def check_northwest(rng):
    """Two staircases above the diagonal with shared ends: the one further northwest costs more."""
    n = int(rng.integers(1, 12))
    h = float(rng.uniform(0.02, 0.3))
    t0 = float(rng.uniform(0.05, 1.0))
    s1, s2 = random_dyck(rng, n), random_dyck(rng, n)
    y1, y2 = np.cumsum(s1), np.cumsum(s2)
    hi = np.maximum(y1, y2)
    lo = np.minimum(y1, y2)
    to_steps = lambda ys: list(np.diff(np.concatenate([[0], ys])).astype(int))
    g1 = staircase((t0, t0), to_steps(hi), h)
    g2 = staircase((t0, t0), to_steps(lo), h)
    w1, w2 = w(g1), w(g2)
    return w1 >= w2 - 1e-10 * (1 + w2), (g1, g2, w1, w2)


CHECKS = {
    "triangle": check_triangle,
    "axis_bound": check_axis_bound,
    "diagonal_bound": check_diagonal_bound,
    "split": check_split,
    "shift": check_shift,
    "northwest": check_northwest,
    "start_monotone": check_start_monotone,
}
