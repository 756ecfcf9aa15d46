"""Good hierarchies over border events, with the energy quantities built on them.

A hierarchy is stored as a flat vertex list with the root at index 0. Vertex
labels are rectangles; a vertex with no children is a seed, one child makes it
normal, two children a splitter.

Goodness is parameterised by the two thresholds ``2Z/q`` and ``T/q`` (see
:class:`Thresholds`). Desk-scale tests set them directly to small integers;
:class:`ScaleParams` derives them from the real constant chain.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from bootperc import analytic
from bootperc.analytic import LAMBDA, RateParams, g
from bootperc.lattice import Configuration, Direction, Model, Rect, Site, closure, is_traversable
from bootperc.spanning import disjoint_spanning_pair, spans
from bootperc.variational import W_dp, W_estimate, vsplit_s


class HierarchyError(ValueError):
    pass


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class Thresholds:
    """Goodness thresholds in lattice units: ``two_Z_over_q`` = 2Z/q, ``T_over_q`` = T/q."""

    two_Z_over_q: float
    T_over_q: float

    def __post_init__(self):
        if self.two_Z_over_q <= 0 or self.T_over_q <= 0:
            raise ValueError("thresholds must be positive")

    @property
    def half_T_over_q(self) -> float:
        return self.T_over_q / 2


def _largest_dyadic(pred, start: float = 0.5, floor: float = 1e-300) -> float:
    x = start
    while x > floor:
        if pred(x):
            return x
        x /= 2
    raise ValueError("no admissible power of 1/2 found")


@dataclass(frozen=True)
class ScaleParams:
    """The constant chain (p, B, A, c, Z, T) with the explicit border constant Q."""

    rp: RateParams
    B: float
    A: float
    c: float
    Z: float
    T: float

    def __post_init__(self):
        if not 0 < self.c < 0.5:
            raise ValueError("c must lie in (0, 1/2)")
        if min(self.B, self.A, self.Z, self.T) <= 0:
            raise ValueError("scale constants must be positive")

    @property
    def q(self) -> float:
        return self.rp.q

    @property
    def Q(self) -> float:
        return 3 * math.exp(4 * g(self.Z))

    @property
    def Q1(self) -> float:
        return math.exp(2 * g(self.Z))

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(2 * self.Z / self.q, self.T / self.q)

    @staticmethod
    def border_T(c: float, Z: float) -> float:
        """Largest power of 1/2 below Z/2 with c(log c - log T - 1) >= 2(1-2c)g(Z)."""
        need = 2 * (1 - 2 * c) * g(Z)
        return _largest_dyadic(lambda T: T < Z / 2 and c * (math.log(c) - math.log(T) - 1) >= need)

    @classmethod
    def for_pipeline(cls, B: float, p: float) -> "ScaleParams":
        """A = c = 1/B, Z the largest power of 1/2 with Z < A/2 and g(2Z) >= 4λ/A, then T."""
        A = c = 1 / B
        Z = _largest_dyadic(lambda Z: Z < A / 2 and g(2 * Z) >= 4 * LAMBDA / A)
        return cls(RateParams(p), B, A, c, Z, cls.border_T(c, Z))

    def chain_violations(self) -> list[str]:
        """Broken links of 16q < 8T < 4Z < 2A < 1 < B/2 and the Z, T side conditions."""
        out = []
        chain = [16 * self.q, 8 * self.T, 4 * self.Z, 2 * self.A, 1.0, self.B / 2]
        names = ["16q", "8T", "4Z", "2A", "1", "B/2"]
        for i in range(len(chain) - 1):
            if not chain[i] < chain[i + 1]:
                out.append(f"{names[i]} < {names[i + 1]}")
        if g(2 * self.Z) < 4 * LAMBDA / self.A:
            out.append("g(2Z) >= 4λ/A")
        if self.c * (math.log(self.c) - math.log(self.T) - 1) < 2 * (1 - 2 * self.c) * g(self.Z):
            out.append("c(log c - log T - 1) >= 2(1-2c)g(Z)")
        if not self.T < self.Z / 2:
            out.append("T < Z/2")
        return out

    def validate(self) -> "ScaleParams":
        bad = self.chain_violations()
        if bad:
            raise ValueError("scale constraints violated: " + "; ".join(bad))
        return self


# ---------------------------------------------------------------- border events

def border_strips(inner: Rect, outer: Rect) -> dict[str, Optional[Rect]]:
    """The four side strips of ``outer`` minus ``inner`` (None when empty).

    ``left``/``right`` span the full height of ``outer`` and are checked for
    horizontal traversability; ``bottom``/``top`` span its full width and are
    checked vertically. Corner blocks belong to two strips.
    """
    if not outer.contains(inner):
        raise ValueError("inner rectangle must lie inside outer")
    o, i = outer, inner

    def mk(x0, y0, x1, y1):
        return Rect(x0, y0, x1, y1) if x0 <= x1 and y0 <= y1 else None

    return {
        "left": mk(o.x_min, o.y_min, i.x_min - 1, o.y_max),
        "right": mk(i.x_max + 1, o.y_min, o.x_max, o.y_max),
        "bottom": mk(o.x_min, o.y_min, o.x_max, i.y_min - 1),
        "top": mk(o.x_min, i.y_max + 1, o.x_max, o.y_max),
    }


_STRIP_DIRECTION = {"left": Direction.HORIZONTAL, "right": Direction.HORIZONTAL,
                    "bottom": Direction.VERTICAL, "top": Direction.VERTICAL}


def border_event_holds(inner: Rect, outer: Rect, c: Configuration) -> bool:
    """Whether D(inner, outer) occurs: both side strips horizontally and both
    end strips vertically traversable."""
    strips = border_strips(inner, outer)
    return all(is_traversable(s, c, _STRIP_DIRECTION[k]) for k, s in strips.items())


def border_witness(inner: Rect, outer: Rect, sites: frozenset) -> Optional[frozenset]:
    """Occupied sites certifying D(inner, outer), or None if D fails on ``sites``.

    Picks, for every occupied line of every strip, the occupied site of that
    line nearest to ``inner``.
    """
    strips = border_strips(inner, outer)
    chosen = set()
    for name, strip in strips.items():
        if strip is None:
            continue
        in_strip = [s for s in sites if strip.contains_site(s)]
        horizontal = _STRIP_DIRECTION[name] is Direction.HORIZONTAL
        lines = range(strip.x_min, strip.x_max + 1) if horizontal else range(strip.y_min, strip.y_max + 1)
        occupied_lines = []
        for ln in lines:
            on_line = [s for s in in_strip if (s.x if horizontal else s.y) == ln]
            if on_line:
                centre = (inner.y_min + inner.y_max) / 2 if horizontal else (inner.x_min + inner.x_max) / 2
                chosen.add(min(on_line, key=lambda s: (abs((s.y if horizontal else s.x) - centre), s)))
                occupied_lines.append(True)
            else:
                occupied_lines.append(False)
        if any(not a and not b for a, b in zip(occupied_lines, occupied_lines[1:])):
            return None
    return frozenset(chosen)


def border_bound(inner_dims: Sequence[int], s: int, t: int, sp: ScaleParams) -> float:
    """Q exp(-(1-2c)[g(nq)s + g(mq)t]) for inner dims (m, n) grown by (s, t)."""
    m, n = inner_dims
    q = sp.q
    if m < sp.Z / q or n < sp.Z / q:
        raise ValueError("need m, n >= Z/q")
    if s > sp.T / q or t > sp.T / q or s < 0 or t < 0:
        raise ValueError("need 0 <= s, t <= T/q")
    return sp.Q * math.exp(-(1 - 2 * sp.c) * (g(n * q) * s + g(m * q) * t))


# ---------------------------------------------------------------- hierarchies

class Kind(enum.Enum):
    SEED = "seed"
    NORMAL = "normal"
    SPLITTER = "splitter"


@dataclass
class HierarchyVertex:
    label: Rect
    children: list = field(default_factory=list)

    @property
    def kind(self) -> Kind:
        return (Kind.SEED, Kind.NORMAL, Kind.SPLITTER)[len(self.children)]


@dataclass
class Hierarchy:
    vertices: list
    root: int = 0

    def __len__(self):
        return len(self.vertices)

    def label(self, v: int) -> Rect:
        return self.vertices[v].label

    def kind(self, v: int) -> Kind:
        return self.vertices[v].kind

    def seeds(self) -> list[int]:
        return [i for i in self.walk() if self.kind(i) is Kind.SEED]

    def normal_edges(self) -> list[tuple[int, int]]:
        return [(i, self.vertices[i].children[0]) for i in self.walk() if self.kind(i) is Kind.NORMAL]

    def count(self, kind: Kind) -> int:
        return sum(1 for i in self.walk() if self.kind(i) is kind)

    def walk(self, start: Optional[int] = None) -> list[int]:
        order, stack = [], [self.root if start is None else start]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.vertices[v].children))
        return order

    def subtree(self, v: int) -> "Hierarchy":
        idx = {old: new for new, old in enumerate(self.walk(v))}
        return Hierarchy([HierarchyVertex(self.vertices[old].label,
                                          [idx[ch] for ch in self.vertices[old].children])
                          for old in idx])

    def chains(self) -> list[list[int]]:
        """All root-to-seed vertex chains."""
        out, stack = [], [[self.root]]
        while stack:
            ch = stack.pop()
            kids = self.vertices[ch[-1]].children
            if not kids:
                out.append(ch)
            for k in kids:
                stack.append(ch + [k])
        return out

    def to_dict(self) -> dict:
        return {"root": self.root,
                "vertices": [{"rect": list(v.label), "kind": v.kind.value, "children": list(v.children)}
                             for v in self.vertices]}


@dataclass
class WitnessedHierarchy:
    """A hierarchy plus one witness set per seed (spanning) and per normal vertex (border event)."""

    hierarchy: Hierarchy
    witnesses: dict

    def to_dict(self) -> dict:
        d = self.hierarchy.to_dict()
        for i, v in enumerate(d["vertices"]):
            v["witness"] = sorted(list(s) for s in self.witnesses.get(i, ()))
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessedHierarchy":
        verts, wit = [], {}
        for i, v in enumerate(d["vertices"]):
            verts.append(HierarchyVertex(Rect(*v["rect"]), list(v["children"])))
            if v.get("witness") or v["kind"] != Kind.SPLITTER.value:
                wit[i] = frozenset(Site(*s) for s in v.get("witness", []))
        h = Hierarchy(verts, d.get("root", 0))
        for i, v in enumerate(d["vertices"]):
            if h.kind(i).value != v["kind"]:
                raise ValueError(f"vertex {i}: kind {v['kind']} disagrees with its child count")
        return cls(h, wit)

    @classmethod
    def from_json(cls, text: str) -> "WitnessedHierarchy":
        return cls.from_dict(json.loads(text))


def _thresholds(sp) -> Thresholds:
    return sp.thresholds if isinstance(sp, ScaleParams) else sp


def _check_builder_scale(sp) -> Thresholds:
    if isinstance(sp, ScaleParams):
        q = sp.q
        if not (0 < 4 * q <= 2 * sp.T <= sp.Z <= 0.5):
            raise ValueError("need 0 < 4q <= 2T <= Z <= 1/2")
    th = _thresholds(sp)
    # termination of the descent needs phi(R) >= 4Z/q > T/(2q) + 2
    if not 2 * th.two_Z_over_q > th.half_T_over_q + 2:
        raise ValueError("thresholds too close: need 4Z/q > T/(2q) + 2")
    return th


class _Builder:
    def __init__(self, th: Thresholds, model: Model):
        self.th = th
        self.model = model
        self.vertices: list[HierarchyVertex] = []
        self.witnesses: dict[int, frozenset] = {}

    def new(self, label: Rect) -> int:
        self.vertices.append(HierarchyVertex(label))
        return len(self.vertices) - 1

    def normal(self, outer: Rect, inner: Rect, sites: frozenset) -> int:
        u = self.new(outer)
        wit = border_witness(inner, outer, frozenset(s for s in sites if not inner.contains_site(s)))
        if wit is None:
            raise HierarchyError(f"border event fails between {tuple(inner)} and {tuple(outer)}")
        self.witnesses[u] = wit
        return u

    def build(self, R: Rect, sites: frozenset) -> int:
        th = self.th
        if R.short < th.two_Z_over_q:
            v = self.new(R)
            self.witnesses[v] = sites
            return v
        # descent S_0 = R ⊃ S_1 ⊃ ... through the larger member of each disjoint pair
        S, S_sites = R, sites
        prev = None
        steps = 0
        while True:
            r1, r2, k1, k2 = disjoint_spanning_pair(S, None, self.model, sites=S_sites)
            if (r1.phi, tuple(-v for v in r1)) < (r2.phi, tuple(-v for v in r2)):
                r1, r2, k1, k2 = r2, r1, k2, k1
            prev = (S, S_sites, (r1, k1), (r2, k2))
            S, S_sites = r1, k1
            steps += 1
            if R.phi - S.phi >= th.half_T_over_q:
                break
        drop = R.phi - S.phi
        if drop <= th.T_over_q:
            u = self.normal(R, S, sites)
            inner_sites = frozenset(s for s in sites if S.contains_site(s))
            self.vertices[u].children = [self.build(S, inner_sites)]
            return u
        parent, parent_sites, (a, ka), (b, kb) = prev
        if steps == 1:
            u = self.new(R)
            self.vertices[u].children = [self.build(a, ka), self.build(b, kb)]
            return u
        if parent.short < th.two_Z_over_q:
            raise HierarchyError(
                f"splitter {tuple(parent)} has short side below 2Z/q; cannot keep goodness (ii)")
        u = self.normal(R, parent, sites)
        y = self.new(parent)
        self.vertices[u].children = [y]
        self.vertices[y].children = [self.build(a, ka), self.build(b, kb)]
        return u


def build_good_hierarchy(r: Rect, c: Configuration, sp, m: Model = Model.STANDARD) -> WitnessedHierarchy:
    """Construct a good hierarchy rooted at an internally spanned ``r`` that occurs on ``c``.

    ``sp`` is a :class:`ScaleParams` or desk-scale :class:`Thresholds`. Seeds
    are witnessed by their occupied sites; normal vertices by a border-event
    certificate drawn from their annulus.
    """
    th = _check_builder_scale(sp)
    sites = c.restrict(r).occupied
    if not sites or not closure(c.restrict(r), m).is_full():
        raise ValueError("rectangle is not internally spanned")
    b = _Builder(th, m)
    root = b.build(r, sites)
    if root != 0:
        raise AssertionError("root must be the first vertex created")
    return WitnessedHierarchy(Hierarchy(b.vertices), b.witnesses)


def goodness_violations(h: Hierarchy, sp, m: Model = Model.STANDARD) -> list[str]:
    th = _thresholds(sp)
    out = []
    for u in h.walk():
        vert = h.vertices[u]
        R = vert.label
        for ch in vert.children:
            if not (R.contains(h.label(ch)) and R != h.label(ch)):
                out.append(f"vertex {u}: child {ch} label is not a strict subset")
        kind = vert.kind
        if kind is Kind.SEED and not R.short < th.two_Z_over_q:
            out.append(f"(i) seed {u} short side {R.short} >= 2Z/q")
        if kind is not Kind.SEED and not R.short >= th.two_Z_over_q:
            out.append(f"(ii) vertex {u} short side {R.short} < 2Z/q")
        if kind is Kind.NORMAL:
            v = vert.children[0]
            drop = R.phi - h.label(v).phi
            if h.kind(v) is Kind.SPLITTER:
                if not drop <= th.T_over_q:
                    out.append(f"(iv) edge {u}->{v} drop {drop} > T/q")
            elif not th.half_T_over_q <= drop <= th.T_over_q:
                out.append(f"(iii) edge {u}->{v} drop {drop} outside [T/2q, T/q]")
        if kind is Kind.SPLITTER:
            v, w = vert.children
            if not spans(h.label(v), h.label(w), R, m):
                out.append(f"splitter {u}: children do not span its label")
            for ch in (v, w):
                if not R.phi - h.label(ch).phi >= th.half_T_over_q:
                    out.append(f"(v) splitter {u} child {ch} drop below T/2q")
    return out


def is_good(h: Hierarchy, sp, m: Model = Model.STANDARD) -> bool:
    return not goodness_violations(h, sp, m)


def occurrence_violations(wh: WitnessedHierarchy, c: Configuration, m: Model = Model.STANDARD) -> list[str]:
    h, wit = wh.hierarchy, wh.witnesses
    out = []
    occ = c.occupied
    used: dict = {}
    for u in h.walk():
        kind = h.kind(u)
        if kind is Kind.SPLITTER:
            continue
        if u not in wit:
            out.append(f"vertex {u}: missing witness")
            continue
        W = wit[u]
        if not W <= occ:
            out.append(f"vertex {u}: witness has vacant sites")
        for s in W:
            if s in used:
                out.append(f"vertex {u}: site {tuple(s)} also used by vertex {used[s]}")
            used[s] = u
        R = h.label(u)
        if kind is Kind.SEED:
            if not all(R.contains_site(s) for s in W) or not closure(
                    Configuration.from_sites(R, W), m).is_full():
                out.append(f"seed {u}: witness does not internally span its label")
        else:
            inner = h.label(h.vertices[u].children[0])
            if any(inner.contains_site(s) or not R.contains_site(s) for s in W):
                out.append(f"normal {u}: witness leaves the annulus")
            elif not border_event_holds(inner, R, Configuration.from_sites(R, W)):
                out.append(f"normal {u}: witness does not certify the border event")
    return out


def hierarchy_occurs(wh: WitnessedHierarchy, c: Configuration, m: Model = Model.STANDARD) -> bool:
    """Validate the stored witnesses against ``c``.

    Witness sets must be pairwise disjoint subsets of the occupied sites, each
    certifying the event of its vertex.
    """
    return not occurrence_violations(wh, c, m)


def occurs_on(h: Hierarchy, c: Configuration, m: Model = Model.STANDARD) -> bool:
    """Whether ``h`` occurs on ``c``, for hierarchies whose splitter children are disjoint.

    With disjoint sibling labels every obligation lives on its own set of
    sites, so disjoint occurrence reduces to each event holding.
    """
    for u in h.walk():
        kind = h.kind(u)
        R = h.label(u)
        if kind is Kind.SPLITTER:
            a, b = (h.label(ch) for ch in h.vertices[u].children)
            if a.intersects(b):
                raise NotImplementedError("overlapping splitter children need a witness search")
        elif kind is Kind.SEED:
            if not closure(c.restrict(R), m).is_full():
                return False
        elif not border_event_holds(h.label(h.vertices[u].children[0]), R, c):
            return False
    return True


# ---------------------------------------------------------------- energies

def V(r: Rect, rp: RateParams) -> float:
    """q long(r) g(q short(r))."""
    q = rp.q
    return q * r.long * g(q * r.short)


def _scaled(dims, q):
    return (q * dims[0], q * dims[1])


def U(inner: Rect | Sequence[int], outer: Rect | Sequence[int], rp: RateParams,
      grid_steps: int = 256) -> float:
    """W(q dim(inner), q dim(outer)) through the grid evaluator."""
    a = inner.dims if isinstance(inner, Rect) else tuple(inner)
    b = outer.dims if isinstance(outer, Rect) else tuple(outer)
    if not (a[0] <= b[0] and a[1] <= b[1]):
        raise ValueError("inner dimensions must not exceed outer dimensions")
    return W_dp(_scaled(a, rp.q), _scaled(b, rp.q), grid_steps)


def U_estimate(inner, outer, rp: RateParams, grid_steps: int = 64):
    a = inner.dims if isinstance(inner, Rect) else tuple(inner)
    b = outer.dims if isinstance(outer, Rect) else tuple(outer)
    return W_estimate(_scaled(a, rp.q), _scaled(b, rp.q), grid_steps)


def pod(h: Hierarchy, sp, m: Model = Model.STANDARD, check: bool = True) -> tuple[int, int]:
    """Integer dimensions of the pod, computed bottom-up."""
    if check and not is_good(h, sp, m):
        raise ValueError("pod is only defined for good hierarchies")

    def rec(v):
        vert = h.vertices[v]
        if vert.kind is Kind.SEED:
            return vert.label.dims
        if vert.kind is Kind.NORMAL:
            return rec(vert.children[0])
        y1, y2 = vert.children
        s = vsplit_s(rec(y1), h.label(y1).dims, rec(y2), h.label(y2).dims, vert.label.dims)
        return (int(s[0]), int(s[1]))

    return rec(h.root)


@dataclass(frozen=True)
class PodCheck:
    lhs: float
    rhs: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - self.slack


def pod_inequality(h: Hierarchy, rp: RateParams, Z: float, sp=None, m: Model = Model.STANDARD,
                   grid_steps: int = 64) -> PodCheck:
    """Sum of U over normal edges against U(pod, root) - N_split 2q g(Z).

    Grid values overestimate W, so the left side needs no slack; the right
    side carries the two-resolution gap of its U evaluation.
    """
    dims = pod(h, sp, m) if sp is not None else pod(h, None, m, check=False)
    lhs = math.fsum(U_estimate(h.label(v), h.label(u), rp, grid_steps).value
                    for u, v in h.normal_edges())
    est = U_estimate(dims, h.label(h.root), rp, grid_steps)
    rhs = est.value - h.count(Kind.SPLITTER) * 2 * rp.q * g(Z)
    return PodCheck(lhs, rhs, est.eps_grid)


def seed_perimeter_check(h: Hierarchy, sp, rp: RateParams, Z: float, m: Model = Model.STANDARD):
    """(sum of seed V, g(2Z)/2 q phi(pod)); the first must dominate."""
    dims = pod(h, sp, m)
    lhs = math.fsum(V(h.label(w), rp) for w in h.seeds())
    return lhs, g(2 * Z) / 2 * rp.q * (dims[0] + dims[1])


def chain_length_bound(root: Rect, sp) -> float:
    """2 * phi(root) / (T/2q) + 1, the cap on vertices along any root-to-seed chain."""
    th = _thresholds(sp)
    return 2 * root.phi / th.half_T_over_q + 1


@dataclass(frozen=True)
class HierarchyBound:
    """Natural logs of the hierarchy probability bounds, plus the vertex-count cap."""

    log_hocc: float
    log_hocc2: float
    log_hocc3: float
    branch: str
    log2_M: float
    n_vertices: int

    @property
    def hocc(self) -> float:
        return math.exp(min(self.log_hocc, 700.0))

    @property
    def hocc2(self) -> float:
        return math.exp(min(self.log_hocc2, 700.0))

    @property
    def hocc3(self) -> float:
        return math.exp(min(self.log_hocc3, 700.0))


def hierarchy_probability_bound(h: Hierarchy, sp: ScaleParams, m: Model = Model.STANDARD,
                                grid_steps: int = 128, thresholds: Optional[Thresholds] = None) -> HierarchyBound:
    """Evaluate the BK product bound together with its two pod forms.

    Goodness is checked against ``thresholds`` when given (desk scale) and
    against the thresholds implied by ``sp`` otherwise.
    """
    th = thresholds if thresholds is not None else sp
    if not is_good(h, th, m):
        raise ValueError("bound is only stated for good hierarchies")
    q, c, Z, A, B = sp.q, sp.c, sp.Z, sp.A, sp.B
    n_norm, n_split = h.count(Kind.NORMAL), h.count(Kind.SPLITTER)
    sum_U = math.fsum(U(h.label(v), h.label(u), sp.rp, grid_steps) for u, v in h.normal_edges())
    sum_V = math.fsum(V(h.label(w), sp.rp) for w in h.seeds())
    log_hocc = n_norm * math.log(sp.Q) - ((1 - 2 * c) * sum_U + sum_V) / q
    S = pod(h, th, m)
    phi_S = S[0] + S[1]
    U_SR = U(S, h.label(h.root), sp.rp, grid_steps)
    log_hocc2 = (n_norm * math.log(sp.Q) + n_split * math.log(sp.Q1)
                 - ((1 - 2 * c) * U_SR + g(2 * Z) / 2 * q * phi_S) / q)
    log2_M = 20 * B / sp.T
    if len(h) > 2 ** min(log2_M, 1000):
        raise AssertionError("vertex count exceeds 2^(20B/T)")
    M = 2.0 ** min(log2_M, 1000)
    branch = "pod_small" if q * phi_S <= A else "pod_large"
    log_Q2 = math.log(max(sp.Q, sp.Q1))
    log_hocc3 = M * log_Q2 - 2 * (1 - 2 * c) * analytic.g_integral(A, B) / q
    return HierarchyBound(log_hocc, log_hocc2, log_hocc3, branch, log2_M, len(h))
