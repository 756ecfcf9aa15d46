"""Rate functions, double-gap probabilities and the threshold integrals.

All functions accept scalars or numpy arrays. ``g`` is evaluated through an
algebraically rearranged form of ``1 - beta`` so it keeps full relative
precision for large arguments, where ``beta`` rounds to 1.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

LAMBDA = math.pi ** 2 / 18
LAMBDA_MODIFIED = math.pi ** 2 / 6


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy within its budget."""


class Integrand(enum.Enum):
    F = "f"
    G = "g"


@dataclass(frozen=True)
class RateParams:
    """Site probability ``p`` together with ``q = -log(1 - p)``."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def q(self) -> float:
        return -math.log1p(-self.p)

    @classmethod
    def from_q(cls, q: float) -> "RateParams":
        if q <= 0:
            raise ValueError("q must be positive")
        return cls(-math.expm1(-q))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def to_dict(self) -> dict:
        return asdict(self)


def _positive(z, name="z"):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise ValueError(f"{name} must be positive")
    return z


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def f(z):
    """-log(1 - e^{-z})."""
    z = _positive(z)
    return _scalar(-np.log(-np.expm1(-z)))


def beta(u):
    """(u + sqrt(u(4 - 3u))) / 2 on (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise ValueError("u must lie in (0, 1)")
    return _scalar((u + np.sqrt(u * (4 - 3 * u))) / 2)


def _g_from_e(e):
    # e = exp(-z); beta(1 - e) - 1 = -2e^2 / (sqrt(1 + 2e - 3e^2) + 1 + e)
    root = np.sqrt((1 - e) * (1 + 3 * e))
    return -np.log1p(-2 * e * e / (root + 1 + e))


def g(z):
    """-log beta(1 - e^{-z})."""
    z = _positive(z)
    return _scalar(_g_from_e(np.exp(-z)))


def g_integral(a: float, b: float, tol: float = 1e-10) -> float:
    """Integral of g over [a, b] (0 < a <= b, b may be inf)."""
    if a <= 0:
        raise ValueError("lower limit must be positive")
    if b < a:
        raise ValueError("b must be >= a")
    if b == a:
        return 0.0
    if math.isinf(b):
        # x = e^{-z} maps [a, inf) to (0, e^{-a}]
        val, err = integrate.quad(lambda x: _g_from_e(x) / x, 0.0, math.exp(-a),
                                  epsabs=tol, epsrel=tol, limit=200)
        return val
    return _gauss_adaptive(g, a, b, tol)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl(fn, a, b):
    mid, half = (a + b) / 2, (b - a) / 2
    return half * float(np.dot(_GL_WEIGHTS, fn(mid + half * _GL_NODES)))


def _gauss_adaptive(fn, a, b, tol, depth=0):
    whole = _gl(fn, a, b)
    mid = (a + b) / 2
    left, right = _gl(fn, a, mid), _gl(fn, mid, b)
    if abs(left + right - whole) <= tol or depth > 40:
        return left + right
    return (_gauss_adaptive(fn, a, mid, tol / 2, depth + 1)
            + _gauss_adaptive(fn, mid, b, tol / 2, depth + 1))


def _quad(fn, a, b, tol, budget):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            out = integrate.quad(fn, a, b, epsabs=tol / 10, epsrel=1e-14, limit=budget, full_output=1)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from None
    if len(out) > 3:
        # a fourth element carries quadpack's failure message
        raise QuadratureError(str(out[3]).strip().splitlines()[0])
    val, err, info = out
    return QuadratureResult(float(val), float(err), int(info["neval"]))


def lambda_integral(which: Integrand | str = Integrand.G, tolerance: float = 1e-8,
                    budget: int = 200) -> QuadratureResult:
    """Integral of f or g over (0, inf) after substituting x = e^{-z}.

    ``budget`` caps the number of subintervals of the adaptive scheme; running
    out raises :class:`QuadratureError` rather than returning a truncated value.
    """
    which = Integrand(which)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if which is Integrand.F:
        return _quad(lambda x: -math.log1p(-x) / x if x > 0 else 1.0, 0.0, 1.0,
                     tolerance, budget)
    return _quad(lambda x: float(_g_from_e(x)) / x if x > 0 else 0.0, 0.0, 1.0,
                 tolerance, budget)


def g_integral_rational_form(tolerance: float = 1e-8) -> QuadratureResult:
    """Integral of log(x)(2x - 1)/(1 - x + x^2) over (0, 1)."""
    return _quad(lambda x: math.log(x) * (2 * x - 1) / (1 - x + x * x) if x > 0 else 0.0,
                 0.0, 1.0, tolerance, 200)


def g_integral_dilog_form(tolerance: float = 1e-8) -> QuadratureResult:
    """(2/3) times the integral of log(1 + x)/x over (0, 1)."""
    r = _quad(lambda x: math.log1p(x) / x if x > 0 else 1.0, 0.0, 1.0, tolerance, 200)
    return QuadratureResult(2 * r.value / 3, 2 * r.error_estimate / 3, r.evaluations)


def no_double_gap_prob(k: int, u):
    """Probability a_k(u) that k independent events of probability u have no double gap."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    u = np.asarray(u, dtype=float)
    prev, cur = np.ones_like(u), np.ones_like(u)
    for _ in range(k - 1):
        prev, cur = cur, u * cur + (1 - u) * u * prev
    return _scalar(cur)


def log_no_double_gap_prob(k: int, u):
    """log a_k(u), renormalising every step so large k does not underflow."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    u = np.asarray(u, dtype=float)
    log_scale = np.zeros_like(u)
    prev, cur = np.ones_like(u), np.ones_like(u)
    for _ in range(k - 1):
        prev, cur = cur, u * cur + (1 - u) * u * prev
        prev, cur = prev / cur, np.ones_like(cur)
        log_scale = log_scale - np.log(prev)
    return _scalar(log_scale)


def exact_traverse_prob(m: int, n: int, rp: RateParams, direction: str = "horizontal"):
    """Exact probability that an m x n rectangle is horizontally or East traversable.

    A column of n sites is occupied with probability u = 1 - e^{-nq}. For the
    vertical and North variants swap m and n at the call site.
    """
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    u = -math.expm1(-n * rp.q)
    direction = str(getattr(direction, "value", direction)).lower()
    if direction == "horizontal":
        return no_double_gap_prob(m, u)
    if direction == "east":
        return u * no_double_gap_prob(m - 1, u)
    raise ValueError(f"direction must be 'horizontal' or 'east', got {direction!r}")


def lower_bound_terms(rp: RateParams, depth: int) -> tuple[float, np.ndarray]:
    """(-(2r+1) p log p, per-k values of 2p[(r-1)g(krq) + f(krq)]) for k = 1..depth."""
    p, q = rp.p, rp.q
    r = int(math.floor(p ** -0.5))
    z = np.arange(1, depth + 1) * r * q
    terms = 2 * p * ((r - 1) * np.asarray(g(z)) + np.asarray(f(z)))
    return -(2 * r + 1) * p * math.log(p), terms


def lower_bound_exponent(B: float, rp: RateParams, eps: float = 1e-18) -> float:
    """-p log of the corner-growth lower bound on the spanning probability.

    The bound holds for every side length, so ``B`` only fixes the scale of the
    box of interest and does not change the value. The product over strips is
    truncated once the remaining terms are below ``eps``; both f and g decay at
    least like e^{-z}, so the geometric tail bound fixes the depth.
    """
    if B <= 0:
        raise ValueError("B must be positive")
    r = int(math.floor(rp.p ** -0.5))
    step = r * rp.q
    # tail of sum_{k>K} 2p r e^{-k step} is below eps once K step > log(2pr/(eps(1-e^-step)))
    depth = int(math.ceil(math.log(2 * rp.p * r / (eps * -math.expm1(-step))) / step)) + 1
    head, terms = lower_bound_terms(rp, max(depth, 1))
    return head + float(math.fsum(terms))
