"""Exhaustive enumeration over all configurations of small rectangles.

Configurations are bitmasks on an m x n box with bit ``x + m*y`` for the site
``(x + 1, y + 1)``. Spanning polynomials count spanned configurations by
cardinality; the structural checks iterate every configuration and report
counterexamples as JSON-ready dictionaries.
"""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from bootperc import _kernels
from bootperc.lattice import Configuration, Direction, Model, Rect, closure, is_traversable
from bootperc.montecarlo import default_workers
from bootperc.spanning import (check_span_dims, disjoint_spanning_pair, find_intermediate_rectangle,
                               run_merge_algorithm, verify_pair)

BUDGET = 24


class BudgetError(ValueError):
    """The enumeration would exceed 2^24 configurations."""


class Property(enum.Enum):
    """Structural claims checked by :func:`verify_exhaustive`.

    LEMMA4_I: a spanned box is East- and North-traversable.
    LEMMA24: a spanned box with long side >= 2k+1 contains a spanned
    sub-rectangle with long side in [k, 2k+1].
    PROP30: a spanned box has a disjoint pair of spanned strict sub-rectangles
    that span it.
    SPAN_DIMS: every merge step obeys the dimension bound.
    """

    LEMMA4_I = "lemma4_i"
    LEMMA24 = "lemma24"
    PROP30 = "prop30"
    SPAN_DIMS = "span_dims"


def _check_dims(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    if m * n > BUDGET:
        raise BudgetError(f"{m}x{n} has {m * n} sites; enumeration budget is {BUDGET}")


def mask_to_config(mask: int, m: int, n: int) -> Configuration:
    bits = (int(mask) >> np.arange(m * n)) & 1
    return Configuration(Rect.from_dims(m, n), bits.reshape(n, m).T.astype(bool))


def config_to_mask(c: Configuration) -> int:
    m, n = c.domain.dims
    bits = c.grid.T.reshape(-1)
    return int(sum(1 << i for i in np.nonzero(bits)[0]))


@dataclass(frozen=True)
class SpanPolynomial:
    """``coeffs[k]`` spanned configurations with exactly k occupied sites."""

    m: int
    n: int
    model: Model
    coeffs: tuple

    def __call__(self, p: float) -> float:
        N = self.m * self.n
        return float(sum(ck * p ** k * (1 - p) ** (N - k) for k, ck in enumerate(self.coeffs)))

    def derivative(self, p: float) -> float:
        N = self.m * self.n
        total = 0.0
        for k, ck in enumerate(self.coeffs):
            if k:
                total += ck * k * p ** (k - 1) * (1 - p) ** (N - k)
            if N - k:
                total -= ck * (N - k) * p ** k * (1 - p) ** (N - k - 1)
        return total

    def to_dict(self) -> dict:
        return {"dims": [self.m, self.n], "model": self.model.value, "coeffs": list(self.coeffs)}


def _count_partitioned(kernel, args, total: int, workers: Optional[int]) -> np.ndarray:
    workers = default_workers() if workers is None else int(workers)
    chunks = max(1, workers * 4) if total > 1 << 12 else 1
    edges = np.linspace(0, total, chunks + 1).astype(np.int64)
    spans = list(zip(edges[:-1], edges[1:]))
    if workers == 1:
        parts = [kernel(*args, int(a), int(b)) for a, b in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: kernel(*args, int(ab[0]), int(ab[1])), spans))
    return np.sum(parts, axis=0)


def exact_span_polynomial(m: int, n: int, model: Model = Model.STANDARD,
                          workers: Optional[int] = None) -> SpanPolynomial:
    _check_dims(m, n)
    model = Model(model)
    counts = _count_partitioned(_kernels.span_counts, (m, n, model is Model.MODIFIED),
                                1 << (m * n), workers)
    return SpanPolynomial(m, n, model, tuple(int(v) for v in counts))


def exact_I(m: int, n: int, p: float, model: Model = Model.STANDARD) -> float:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return exact_span_polynomial(m, n, model)(p)


def exact_traverse_enum(m: int, n: int, p: float, direction: Direction | str = Direction.HORIZONTAL) -> float:
    """Traversability probability of R(m, n) summed over all 2^{mn} configurations."""
    direction = Direction(direction)
    if direction in (Direction.VERTICAL, Direction.NORTH):
        m, n = n, m
    _check_dims(m, n)
    counts = _kernels.traverse_counts(m, n, direction in (Direction.EAST, Direction.NORTH))
    N = m * n
    return float(sum(int(ck) * p ** k * (1 - p) ** (N - k) for k, ck in enumerate(counts)))


def _gray_masks(N: int):
    for i in range(1 << N):
        yield i ^ (i >> 1)


def _check_traversal(r, c, model, k):
    out = []
    if not is_traversable(r, c, Direction.EAST):
        out.append("spanned but not East-traversable")
    if not is_traversable(r, c, Direction.NORTH):
        out.append("spanned but not North-traversable")
    return out


def _check_intermediate(r, c, model, k):
    t = find_intermediate_rectangle(r, c, k, model)
    out = []
    if not (k <= t.long <= 2 * k + 1):
        out.append(f"long side {t.long} of {tuple(t)} outside [{k}, {2 * k + 1}]")
    if not r.contains(t) or not closure(c.restrict(t), model).is_full():
        out.append(f"{tuple(t)} is not an internally spanned sub-rectangle")
    return out


def _check_disjoint_pair(r, c, model, k):
    return verify_pair(r, c, disjoint_spanning_pair(r, c, model), model)


def _check_span_dims(r, c, model, k):
    tree = run_merge_algorithm(c, model)
    out = []
    for node in tree.nodes:
        if node.children:
            a, b = (tree.nodes[i].rect for i in node.children)
            if not check_span_dims(a, b, node.rect, model):
                out.append(f"merge {tuple(a)} + {tuple(b)} -> {tuple(node.rect)} breaks the dimension bound")
    return out


_CHECKS = {
    Property.LEMMA4_I: _check_traversal,
    Property.LEMMA24: _check_intermediate,
    Property.PROP30: _check_disjoint_pair,
    Property.SPAN_DIMS: _check_span_dims,
}


def verify_exhaustive(prop: Property | str, m: int, n: int, model: Model = Model.STANDARD,
                      k: Optional[int] = None) -> dict:
    """Check a structural claim on every spanned configuration of R(m, n)."""
    prop = Property(prop.lower() if isinstance(prop, str) else prop)
    model = Model(model)
    _check_dims(m, n)
    r = Rect.from_dims(m, n)
    if prop is Property.LEMMA24:
        if k is None or k < 1:
            raise ValueError("the intermediate-rectangle check needs a positive k")
        if r.long < 2 * k + 1:
            raise ValueError("the intermediate-rectangle check needs long side >= 2k + 1")
    check = _CHECKS[prop]
    full = (1 << (m * n)) - 1
    checked = spanned = 0
    counterexamples = []
    for mask in _gray_masks(m * n):
        checked += 1
        if _kernels.bitboard_closure(mask, m, n, model is Model.MODIFIED) != full:
            continue
        if prop is Property.PROP30 and m * n < 2:
            continue
        spanned += 1
        c = mask_to_config(mask, m, n)
        problems = check(r, c, model, k)
        if problems:
            counterexamples.append({"mask": int(mask), "configuration": c.to_text(), "problems": problems})
    report = {"property": prop.value, "dims": [m, n], "model": model.value,
              "configurations_checked": checked, "spanned": spanned,
              "counterexamples": counterexamples}
    if k is not None:
        report["k"] = k
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True)


@dataclass(frozen=True)
class PairSearch:
    """Spanned configurations without a disjoint spanning pair, and those whose pairs all overlap."""

    m: int
    n: int
    model: Model
    spanned: int
    missing: tuple
    forced_overlap: tuple

    def to_dict(self) -> dict:
        return {"dims": [self.m, self.n], "model": self.model.value, "spanned": self.spanned,
                "missing": list(self.missing), "forced_overlap": list(self.forced_overlap)}


def search_forced_overlap(m: int, n: int, model: Model = Model.STANDARD) -> PairSearch:
    """Subset search over every spanned configuration of the box.

    A configuration lands in ``missing`` if no two disjoint subsets span strict
    sub-rectangles whose union closes to the box, and in ``forced_overlap`` if
    such pairs exist but every one of them has intersecting rectangles.
    Memory grows as 2^{mn}, so the box is capped at 20 sites.
    """
    model = Model(model)
    if m < 1 or n < 1 or m * n > 20:
        raise BudgetError("pair search is limited to boxes of at most 20 sites")
    if m * n < 2:
        raise ValueError("the box needs at least two sites")
    missing, forced = _kernels.spanned_pair_search(m, n, model is Model.MODIFIED)
    spanned = sum(exact_span_polynomial(m, n, model, workers=1).coeffs)
    return PairSearch(m, n, model, spanned, tuple(int(v) for v in missing), tuple(int(v) for v in forced))


def binomial_bounds_ok(poly: SpanPolynomial) -> bool:
    N = poly.m * poly.n
    return all(0 <= ck <= comb(N, k) for k, ck in enumerate(poly.coeffs)) and poly.coeffs[N] == 1
