"""The path functional w on monotone paths in the positive quadrant, and its infimum W.

For a segment from u to v the line integral of g(y)dx + g(x)dy reduces to
one-dimensional integrals of g::

    (dx/dy) * int_{u2}^{v2} g  +  (dy/dx) * int_{u1}^{v1} g

with the axis-parallel cases dx * g(u2) and dy * g(u1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from bootperc import _kernels
from bootperc.analytic import g, g_integral


class Vec2(NamedTuple):
    a1: float
    a2: float

    def __add__(self, other):
        return Vec2(self.a1 + other[0], self.a2 + other[1])

    def __sub__(self, other):
        return Vec2(self.a1 - other[0], self.a2 - other[1])

    def __le__(self, other):
        return self.a1 <= other[0] and self.a2 <= other[1]

    def __ge__(self, other):
        return self.a1 >= other[0] and self.a2 >= other[1]


def vmax(u, v) -> Vec2:
    return Vec2(max(u[0], v[0]), max(u[1], v[1]))


def vmin(u, v) -> Vec2:
    return Vec2(min(u[0], v[0]), min(u[1], v[1]))


def _check_positive(*vs):
    for v in vs:
        if not (v[0] > 0 and v[1] > 0):
            raise ValueError(f"{tuple(v)} is not in the open positive quadrant")


class MonotonePath:
    """Piecewise-linear path through coordinate-wise nondecreasing vertices."""

    def __init__(self, vertices: Iterable[Sequence[float]]):
        verts = [Vec2(float(v[0]), float(v[1])) for v in vertices]
        if not verts:
            raise ValueError("a path needs at least one vertex")
        _check_positive(*verts)
        for u, v in zip(verts, verts[1:]):
            if not u <= v:
                raise ValueError(f"vertices {tuple(u)} -> {tuple(v)} are not nondecreasing")
        self.vertices = verts

    @property
    def start(self) -> Vec2:
        return self.vertices[0]

    @property
    def end(self) -> Vec2:
        return self.vertices[-1]

    def __add__(self, other: "MonotonePath") -> "MonotonePath":
        if other.start != self.end:
            raise ValueError("paths do not join")
        return MonotonePath(self.vertices + other.vertices[1:])

    def __repr__(self):
        return f"MonotonePath({[tuple(v) for v in self.vertices]})"


def segment_w(u: Vec2, v: Vec2, tol: float = 1e-10) -> float:
    dx, dy = v[0] - u[0], v[1] - u[1]
    if dx == 0 and dy == 0:
        return 0.0
    if dy == 0:
        return dx * g(u[1])
    if dx == 0:
        return dy * g(u[0])
    return dx / dy * g_integral(u[1], v[1], tol) + dy / dx * g_integral(u[0], v[0], tol)


def w(path: MonotonePath) -> float:
    """Line integral of g(y)dx + g(x)dy along the path."""
    return math.fsum(segment_w(u, v) for u, v in zip(path.vertices, path.vertices[1:]))


def _cell_integrals(edges: np.ndarray) -> np.ndarray:
    # 16-point Gauss-Legendre per grid cell; g is smooth away from 0
    nodes, weights = np.polynomial.legendre.leggauss(16)
    lo, hi = edges[:-1], edges[1:]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    return half * (np.asarray(g(pts)) @ weights)


def _axis_grids(a: Vec2, b: Vec2, steps: int) -> tuple[np.ndarray, np.ndarray]:
    # common step h on both axes, each axis also carrying the other's offsets,
    # so the diagonal x = y runs through grid points wherever it meets the box
    h = max(b[0] - a[0], b[1] - a[1]) / steps
    k = np.arange(steps + 1)
    pts = np.concatenate([a[0] + h * k, a[1] + h * k, [a[0], a[1], b[0], b[1]]])
    pts = np.sort(pts)
    tol = 1e-12 * max(1.0, float(pts[-1]))
    pts = pts[np.concatenate([[True], np.diff(pts) > tol])]

    def clip(lo, hi):
        inside = pts[(pts > lo + tol) & (pts < hi - tol)]
        return np.concatenate([[lo], inside, [hi]])

    return clip(a[0], b[0]), clip(a[1], b[1])


def W_dp(a: Sequence[float], b: Sequence[float], grid_steps: int = 256) -> float:
    """Grid shortest-path upper approximation of W(a, b).

    Both axes use the step max(b - a) / ``grid_steps`` started from a1 and
    from a2, so every axis has at most 2 * ``grid_steps`` + 2 cells and the
    diagonal x = y is on the grid. Paths use horizontal, vertical and
    cell-diagonal moves with exact edge weights. Grids are nested under
    doubling, so the value is nonincreasing as ``grid_steps`` doubles and
    converges to W from above.
    """
    a, b = Vec2(*map(float, a)), Vec2(*map(float, b))
    _check_positive(a, b)
    if not a <= b:
        raise ValueError(f"need a <= b coordinate-wise, got {tuple(a)}, {tuple(b)}")
    if grid_steps < 1:
        raise ValueError("grid_steps must be positive")
    if a == b:
        return 0.0
    if a[0] == b[0]:
        return (b[1] - a[1]) * g(a[0])
    if a[1] == b[1]:
        return (b[0] - a[0]) * g(a[1])
    xs, ys = _axis_grids(a, b, grid_steps)
    hx, hy = np.diff(xs), np.diff(ys)
    gx, gy = np.asarray(g(xs)), np.asarray(g(ys))
    ix, iy = _cell_integrals(xs), _cell_integrals(ys)
    h_w = hx[:, None] * gy[None, :]
    v_w = gx[:, None] * hy[None, :]
    d_w = (hx[:, None] / hy[None, :]) * iy[None, :] + (hy[None, :] / hx[:, None]) * ix[:, None]
    cost = _kernels.grid_shortest_path(h_w, v_w, d_w)
    return float(cost[-1, -1])


@dataclass(frozen=True)
class WEstimate:
    """A W value at the finer of two grids plus the gap to the coarser one."""

    value: float
    eps_grid: float
    coarse: float
    grid_steps: int


def W_estimate(a, b, grid_steps: int = 128) -> WEstimate:
    """W_dp at ``2 * grid_steps`` with slack from the two-resolution comparison.

    The refinement is nested, so ``coarse >= value``; their difference is the
    first-order estimate of the remaining discretisation error of ``value``.
    """
    coarse = W_dp(a, b, grid_steps)
    fine = W_dp(a, b, 2 * grid_steps)
    return WEstimate(fine, max(coarse - fine, 0.0) + 1e-12, coarse, 2 * grid_steps)


def upper_bound_axis(a, b) -> float:
    """(b1 - a1) g(a2) + (b2 - a2) g(a1)."""
    return (b[0] - a[0]) * g(a[1]) + (b[1] - a[1]) * g(a[0])


def corner_path(a: Sequence[float], b_diag: float) -> MonotonePath:
    """Path a -> (t, t) -> (b_diag, b_diag) with t = max(a1, a2)."""
    a = Vec2(*map(float, a))
    _check_positive(a)
    t = max(a)
    if b_diag < t:
        raise ValueError("b_diag must be at least max(a1, a2)")
    return MonotonePath([a, (t, t), (b_diag, b_diag)])


def W_corner(a: Sequence[float], b_diag: float) -> float:
    """W(a, (b_diag, b_diag)), attained by the corner path."""
    return w(corner_path(a, b_diag))


def vsplit_s(a, b, c, d, r) -> Vec2:
    """a ∨ [(a + c) ∧ (a + c + r - b - d)], for a <= b, c <= d, r >= b, r >= d."""
    a, b, c, d, r = (Vec2(*v) for v in (a, b, c, d, r))
    if not (a <= b and c <= d and b <= r and d <= r):
        raise ValueError("need a <= b, c <= d, b <= r and d <= r")
    ac = a + c
    return vmax(a, vmin(ac, ac + r - b - d))


def staircase(start: Sequence[float], steps: Sequence[int], h: float) -> MonotonePath:
    """Lattice path from ``start``; each step is 0 (east) or 1 (north) of length h."""
    x, y = map(float, start)
    verts = [(x, y)]
    for s in steps:
        if s:
            y += h
        else:
            x += h
        verts.append((x, y))
    return MonotonePath(verts)
