"""Reproducible Monte Carlo estimates of spanning and growth events.

Every trial draws its uniforms from a Philox stream keyed by
``(master_seed, trial_index)``; the site index is the stream position. Sites of
a rectangle are numbered row by row from the lower-left corner, sites of the
box around the origin in square-spiral order so that the radius-t box is a
prefix of every larger box. A site is occupied at level p when its uniform is
below p, which couples all levels of one trial.

Trials are split into contiguous blocks that may run on a thread pool; the
compiled kernels release the GIL and results are reduced in trial order, so
outputs do not depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import norm
from sklearn.isotonic import IsotonicRegression

from bootperc import _kernels
from bootperc.analytic import RateParams, lower_bound_exponent
from bootperc.lattice import Configuration, Direction, Model, Rect, closure_is_full, is_traversable

WORKERS_ENV = "BOOTPERC_WORKERS"
DEFAULT_LEVEL = 0.99
_BLOCK = 64


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- intervals

def wilson_interval(successes: int, trials: int, level: float = DEFAULT_LEVEL) -> tuple[float, float]:
    """Two-sided Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z = float(norm.ppf(0.5 + level / 2))
    n, ph = trials, successes / trials
    denom = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard against rounding pushing the point estimate outside
    return min(lo, ph), max(hi, ph)


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int
    mean: float
    ci_low: float
    ci_high: float
    master_seed: int
    level: float = DEFAULT_LEVEL

    @classmethod
    def from_counts(cls, successes: int, trials: int, master_seed: int,
                    level: float = DEFAULT_LEVEL) -> "Estimate":
        lo, hi = wilson_interval(successes, trials, level)
        return cls(int(successes), int(trials), successes / trials, lo, hi, int(master_seed), level)

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScanRow:
    L: int
    p: float
    estimate: Estimate

    @property
    def p_log_L(self) -> float:
        return self.p * math.log(self.L)


@dataclass(frozen=True)
class ScanResult:
    rows: list
    p_half: dict
    model: Model
    master_seed: int

    def p_half_log_L(self) -> dict:
        return {L: ph * math.log(L) for L, ph in self.p_half.items()}


# ---------------------------------------------------------------- sampling

def _check_seed(master_seed: int) -> int:
    seed = int(master_seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("master_seed must fit in 64 unsigned bits")
    return seed


def trial_uniforms(master_seed: int, trial_index: int, count: int) -> np.ndarray:
    """The first ``count`` uniforms of trial ``trial_index``."""
    key = np.array([_check_seed(master_seed), int(trial_index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).random(count)


def rect_uniforms(r: Rect, master_seed: int, trial_index: int) -> np.ndarray:
    """Uniforms of a trial laid out as ``u[x - x_min, y - y_min]`` (row-major stream)."""
    u = trial_uniforms(master_seed, trial_index, r.area)
    return np.ascontiguousarray(u.reshape(r.height, r.width).T)


def sample_config(r: Rect, p: float, trial_key: tuple[int, int]) -> Configuration:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return Configuration(r, rect_uniforms(r, *trial_key) < p)


@lru_cache(maxsize=32)
def spiral_order(t: int) -> np.ndarray:
    """Sites of the box of L-infinity radius t, ring by ring; shape (n, 2) of (x, y)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    out = [(0, 0)]
    for k in range(1, t + 1):
        ring = [(x, y) for x in range(-k, k + 1) for y in range(-k, k + 1) if max(abs(x), abs(y)) == k]
        out.extend(ring)
    arr = np.array(out, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def box_uniforms(t: int, master_seed: int, trial_index: int) -> np.ndarray:
    """Uniforms on the radius-t box as ``u[x + t, y + t]``, spiral stream order."""
    order = spiral_order(t)
    u = trial_uniforms(master_seed, trial_index, len(order))
    grid = np.empty((2 * t + 1, 2 * t + 1))
    grid[order[:, 0] + t, order[:, 1] + t] = u
    return grid


# ---------------------------------------------------------------- parallel driver

def _run_trials(fn: Callable[[int], object], trials: int, workers: Optional[int]) -> list:
    """Apply ``fn`` to every trial index and return results in trial order."""
    if trials < 1:
        raise ValueError("trials must be positive")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be positive")
    blocks = [range(s, min(s + _BLOCK, trials)) for s in range(0, trials, _BLOCK)]

    def run_block(b):
        return [fn(i) for i in b]

    if workers == 1:
        parts = map(run_block, blocks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, blocks))
    return [x for part in parts for x in part]


def _estimate(outcomes, master_seed, level) -> Estimate:
    return Estimate.from_counts(int(sum(bool(o) for o in outcomes)), len(outcomes), master_seed, level)


# ---------------------------------------------------------------- estimators

def estimate_I(L: int, p: float, trials: int, master_seed: int, m: Model = Model.STANDARD,
               workers: Optional[int] = None, level: float = DEFAULT_LEVEL, n: Optional[int] = None) -> Estimate:
    """Frequency of R(L, n) (default n = L) being internally spanned."""
    if L < 1 or (n is not None and n < 1):
        raise ValueError("side lengths must be positive")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    r = Rect.from_dims(L, L if n is None else n)
    return _estimate(_run_trials(lambda i: closure_is_full(rect_uniforms(r, master_seed, i) < p, m),
                                 trials, workers), master_seed, level)


def origin_activation_time(t: int, p: float, master_seed: int, trial_index: int,
                           m: Model = Model.STANDARD) -> int:
    """Activation time of the origin on the radius-t box, or -1 if never active."""
    occ = box_uniforms(t, master_seed, trial_index) < p
    return int(_kernels.activation_times(occ, m is Model.MODIFIED)[t, t])


def estimate_J(t: int, p: float, trials: int, master_seed: int, m: Model = Model.STANDARD,
               workers: Optional[int] = None, level: float = DEFAULT_LEVEL) -> Estimate:
    """Frequency of the origin being active by time t.

    Only sites within L-infinity distance t can influence the origin by time
    t, so the box of radius t is simulated exactly.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")

    def one(i):
        tt = origin_activation_time(t, p, master_seed, i, m)
        return 0 <= tt <= t

    return _estimate(_run_trials(one, trials, workers), master_seed, level)


def corner_scale(p: float) -> int:
    """r = floor(p^{-1/2})."""
    return int(math.floor(p ** -0.5))


def event_A_holds(c: Configuration, r: int) -> bool:
    """Corner-growth event restricted to the square domain R(m, m) of ``c``.

    Arms of length min(r, m) along both axes are full, (m, 1) and (1, m) are
    occupied, and for each k >= 1 with kr < m the strip of columns
    kr+1..min(kr+r, m) over rows 1..kr is East-traversable (and symmetrically
    North). Strips are clipped at m; the far corner sites supply the last line.
    """
    d = c.domain
    mm = d.width
    if d.height != mm:
        raise ValueError("event A lives on a square")
    x0, y0 = d.x_min, d.y_min
    g = c.grid
    arm = min(r, mm)
    if not (g[:arm, 0].all() and g[0, :arm].all() and g[mm - 1, 0] and g[0, mm - 1]):
        return False
    k = 1
    while k * r < mm:
        hi = min(k * r + r, mm)
        east = Rect(x0 + k * r, y0, x0 + hi - 1, y0 + k * r - 1)
        north = Rect(x0, y0 + k * r, x0 + k * r - 1, y0 + hi - 1)
        if not (is_traversable(east, c, Direction.EAST) and is_traversable(north, c, Direction.NORTH)):
            return False
        k += 1
    return True


class EventAViolation(AssertionError):
    """A trial had the corner-growth event without the square being spanned."""


@dataclass(frozen=True)
class EventAResult:
    estimate: Estimate
    spanned: Estimate
    violations: int
    analytic_lower_bound: float


def estimate_event_A(m: int, p: float, trials: int, master_seed: int, workers: Optional[int] = None,
                     level: float = DEFAULT_LEVEL, strict: bool = True) -> EventAResult:
    """Frequency of event A on R(m, m), with a per-trial check that A implies spanning.

    ``strict`` raises :class:`EventAViolation` on the first violation; otherwise
    the count is reported. The spanning frequency comes from the same trials.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    r = corner_scale(p)
    box = Rect.from_dims(m, m)

    def one(i):
        c = Configuration(box, rect_uniforms(box, master_seed, i) < p)
        a = event_A_holds(c, r)
        s = closure_is_full(c.grid)
        if a and not s and strict:
            raise EventAViolation(f"trial {i}: event A without spanning")
        return a, s

    out = _run_trials(one, trials, workers)
    viol = sum(1 for a, s in out if a and not s)
    bound = math.exp(-lower_bound_exponent(float(m), RateParams(p)) / p)
    return EventAResult(_estimate([a for a, _ in out], master_seed, level),
                        _estimate([s for _, s in out], master_seed, level), viol, bound)


def estimate_traversable(m: int, n: int, p: float, direction: Direction | str, trials: int,
                         master_seed: int, workers: Optional[int] = None,
                         level: float = DEFAULT_LEVEL) -> Estimate:
    direction = Direction(direction)
    box = Rect.from_dims(m, n)
    return _estimate(_run_trials(
        lambda i: is_traversable(box, Configuration(box, rect_uniforms(box, master_seed, i) < p), direction),
        trials, workers), master_seed, level)


def coupled_span_levels(L: int, p_grid: Sequence[float], master_seed: int, trial_index: int,
                        m: Model = Model.STANDARD, n: Optional[int] = None) -> int:
    """Index of the first level of ``p_grid`` at which the trial spans R(L, n)."""
    grid = np.asarray(p_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("p_grid must be a nonempty increasing sequence")
    r = Rect.from_dims(L, L if n is None else n)
    return int(_kernels.first_spanning_level(rect_uniforms(r, master_seed, trial_index), grid,
                                             m is Model.MODIFIED))


# ---------------------------------------------------------------- threshold scan

def default_scan_grid(L: int, points: int = 161, lo: float = 0.05, hi: float = 0.6) -> np.ndarray:
    """p values with p log L evenly spaced in [lo, hi]."""
    return np.linspace(lo, hi, points) / math.log(L)


def p_half_from_curve(p_grid: Sequence[float], means: Sequence[float], weights=None) -> float:
    """Crossing of 1/2 by the isotonic fit of ``means``, linearly interpolated.

    Returns nan when the fitted curve does not cross 1/2 inside the grid.
    """
    p = np.asarray(p_grid, dtype=float)
    fit = IsotonicRegression(y_min=0.0, y_max=1.0, increasing=True).fit_transform(
        p, np.asarray(means, dtype=float), sample_weight=weights)
    above = np.nonzero(fit >= 0.5)[0]
    if above.size == 0 or above[0] == 0:
        return math.nan
    j = above[0]
    y0, y1 = fit[j - 1], fit[j]
    return float(p[j - 1] + (0.5 - y0) / (y1 - y0) * (p[j] - p[j - 1]))


def threshold_scan(L_list: Sequence[int], p_grid, trials: int, master_seed: int,
                   m: Model = Model.STANDARD, workers: Optional[int] = None,
                   level: float = DEFAULT_LEVEL) -> ScanResult:
    """Full factorial spanning scan with p_half(L) per side length.

    ``p_grid`` is either one increasing sequence shared by every L or a
    mapping ``L -> sequence``. Each trial yields its first spanning level in
    one pass, so every cell of a row comes from the same coupled trials.
    """
    if not L_list:
        raise ValueError("L_list must be nonempty")
    rows, p_half = [], {}
    for L in L_list:
        grid = np.asarray(p_grid[L] if isinstance(p_grid, dict) else p_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0) or grid[0] <= 0 or grid[-1] >= 1:
            raise ValueError("p_grid must be an increasing sequence inside (0, 1)")
        # distinct per-L streams: trial index offset by L in the high bits
        base = int(L) << 32
        levels = np.array(_run_trials(lambda i: coupled_span_levels(L, grid, master_seed, base + i, m),
                                      trials, workers), dtype=np.int64)
        hist = np.bincount(levels, minlength=grid.size + 1)
        spanned = np.cumsum(hist)[:grid.size]
        means = []
        for p, s in zip(grid, spanned):
            est = Estimate.from_counts(int(s), trials, master_seed, level)
            rows.append(ScanRow(int(L), float(p), est))
            means.append(est.mean)
        p_half[int(L)] = p_half_from_curve(grid, means)
    return ScanResult(rows, p_half, m, int(master_seed))
