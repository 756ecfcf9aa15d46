"""Rectangle-merging construction of the closure and disjoint spanning pairs.

The merge algorithm starts from the occupied sites as one-site rectangles and
repeatedly replaces a pair whose joint closure is a rectangle by that
rectangle, dropping every item it swallows. Witness sets (the occupied sites
each rectangle was built from) stay pairwise disjoint, so the last merge of an
internally spanned rectangle yields two disjointly spanned sub-rectangles.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bootperc import _kernels
from bootperc.lattice import Configuration, Model, Rect, Site, closure, is_internally_spanned

DISCONNECTED = None


@functools.lru_cache(maxsize=1 << 16)
def _merge_shape(dx1, dy1, w1, h1, dx2, dy2, w2, h2, modified):
    box_w = max(dx1 + w1, dx2 + w2)
    box_h = max(dy1 + h1, dy2 + h2)
    grid = np.zeros((box_w, box_h), dtype=bool)
    grid[dx1:dx1 + w1, dy1:dy1 + h1] = True
    grid[dx2:dx2 + w2, dy2:dy2 + h2] = True
    times = _kernels.activation_times(grid, modified)
    return bool((times != _kernels.NEVER).all())


def rect_union_closure(r1: Rect, r2: Rect, m: Model = Model.STANDARD) -> Optional[Rect]:
    """⟨r1 ∪ r2⟩ if it is a rectangle, else ``DISCONNECTED`` (None).

    The closure of a set never leaves its bounding box, so the union closes to
    a rectangle exactly when bootstrap on the bounding box fills it. Results
    are cached on the translation-invariant shape of the pair.
    """
    if r1 == r2 or r1.contains(r2) or r2.contains(r1):
        raise ValueError("rectangles must be distinct and not nested")
    box = r1.hull(r2)
    filled = _merge_shape(r1.x_min - box.x_min, r1.y_min - box.y_min, r1.width, r1.height,
                          r2.x_min - box.x_min, r2.y_min - box.y_min, r2.width, r2.height,
                          m is Model.MODIFIED)
    return box if filled else DISCONNECTED


@dataclass
class MergeNode:
    rect: Rect
    witness: frozenset
    children: tuple = ()
    step: int = 0


@dataclass
class MergeTree:
    """Every (rect, witness) pair the algorithm created, with merge history.

    ``final`` lists the node indices alive when the algorithm stopped;
    ``history`` holds the live index list after each step, for invariant checks.
    """

    nodes: list = field(default_factory=list)
    final: list = field(default_factory=list)
    history: list = field(default_factory=list)
    model: Model = Model.STANDARD

    @property
    def merges(self) -> int:
        return len(self.history) - 1

    def union(self) -> set:
        out = set()
        for i in self.final:
            out.update(self.nodes[i].rect.sites())
        return out

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "final": list(self.final),
            "nodes": [{"rect": list(n.rect), "witness": sorted(list(s) for s in n.witness),
                       "children": list(n.children), "step": n.step} for n in self.nodes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MergeTree":
        nodes = [MergeNode(Rect(*n["rect"]), frozenset(Site(*s) for s in n["witness"]),
                           tuple(n["children"]), n["step"]) for n in d["nodes"]]
        return cls(nodes=nodes, final=list(d["final"]), model=Model(d["model"]))


def run_merge_algorithm(c: Configuration | frozenset, m: Model = Model.STANDARD,
                        check_invariants: bool = False) -> MergeTree:
    """Run the merge algorithm on the occupied sites of ``c`` (or on a set of sites).

    Pair choice: items are kept sorted by their rectangle bounds and the first
    mergeable pair in that order is merged.
    """
    sites = c.occupied if isinstance(c, Configuration) else frozenset(Site(*s) for s in c)
    if not sites:
        raise ValueError("the occupied set is empty")
    tree = MergeTree(model=m)
    for s in sorted(sites):
        tree.nodes.append(MergeNode(Rect(s.x, s.y, s.x, s.y), frozenset([s])))
    live = list(range(len(tree.nodes)))
    tree.history.append(list(live))
    step = 0
    while True:
        live.sort(key=lambda i: tuple(tree.nodes[i].rect))
        pair = None
        for ii in range(len(live)):
            ri = tree.nodes[live[ii]].rect
            for jj in range(ii + 1, len(live)):
                rj = tree.nodes[live[jj]].rect
                if ri.x_max + 2 < rj.x_min:
                    break  # sorted by x_min: no later item can touch ri
                merged = rect_union_closure(ri, rj, m)
                if merged is not None:
                    pair = (live[ii], live[jj], merged)
                    break
            if pair:
                break
        if pair is None:
            break
        i, j, merged = pair
        step += 1
        node = MergeNode(merged, tree.nodes[i].witness | tree.nodes[j].witness, (i, j), step)
        tree.nodes.append(node)
        live = [k for k in live if not merged.contains(tree.nodes[k].rect)]
        live.append(len(tree.nodes) - 1)
        tree.history.append(sorted(live))
        if check_invariants:
            _check_state(tree, live, sites, m)
    tree.final = sorted(live)
    return tree


def _check_state(tree: MergeTree, live: list, sites: frozenset, m: Model) -> None:
    items = [tree.nodes[k] for k in live]
    seen = set()
    for it in items:
        if seen & it.witness:
            raise AssertionError("witnesses are not pairwise disjoint")
        seen |= it.witness
        if not it.witness <= sites:
            raise AssertionError("witness is not a subset of K")
    for a in items:
        for b in items:
            if a is not b and b.rect.contains(a.rect):
                raise AssertionError("one live rectangle contains another")


def merge_state_items(tree: MergeTree, t: int) -> list[MergeNode]:
    return [tree.nodes[k] for k in tree.history[t]]


def disjoint_spanning_pair(r: Rect, c: Configuration, m: Model = Model.STANDARD,
                           sites: Optional[frozenset] = None):
    """Two strict sub-rectangles spanning ``r`` with disjoint witness sets.

    ``sites`` restricts the occupied sites that may be used (default: all of
    ``c`` inside ``r``). Returns ``(r1, r2, k1, k2)`` from the final merge.
    """
    if r.area < 2:
        raise ValueError("rectangle must contain at least two sites")
    if sites is None:
        if not c.domain.contains(r):
            raise ValueError("rectangle not inside the configuration domain")
        sites = c.restrict(r).occupied
    else:
        sites = frozenset(s for s in sites if r.contains_site(s))
    if not sites:
        raise ValueError("rectangle is not internally spanned")
    tree = run_merge_algorithm(sites, m)
    if len(tree.final) != 1 or tree.nodes[tree.final[0]].rect != r:
        raise ValueError("rectangle is not internally spanned")
    root = tree.nodes[tree.final[0]]
    a, b = (tree.nodes[k] for k in root.children)
    return a.rect, b.rect, a.witness, b.witness


def find_intermediate_rectangle(r: Rect, c: Configuration, k: int,
                                m: Model = Model.STANDARD) -> Rect:
    """An internally spanned T ⊆ r with long(T) in [k, 2k+1].

    Walks down the merge tree from r, always into the child with the larger
    long side; a merge at most takes long sides n, n' to n + n' + 1.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if r.long < 2 * k + 1:
        raise ValueError("need long(r) >= 2k + 1")
    sites = c.restrict(r).occupied
    if not sites:
        raise ValueError("rectangle is not internally spanned")
    tree = run_merge_algorithm(sites, m)
    if len(tree.final) != 1 or tree.nodes[tree.final[0]].rect != r:
        raise ValueError("rectangle is not internally spanned")
    node = tree.nodes[tree.final[0]]
    while node.rect.long > 2 * k + 1:
        node = max((tree.nodes[i] for i in node.children), key=lambda n: n.rect.long)
    if node.rect.long < k:
        raise AssertionError("descent dropped below k; merge bound violated")
    return node.rect


def check_span_dims(r1: Rect, r2: Rect, r: Rect, m: Model = Model.STANDARD) -> bool:
    """dim(r1) + dim(r2) >= dim(r) - (1, 1), given that r1 and r2 span r."""
    if r1 == r2 or r1.contains(r2) or r2.contains(r1) or rect_union_closure(r1, r2, m) != r:
        raise ValueError("precondition ⟨r1 ∪ r2⟩ = r does not hold")
    return (r1.width + r2.width >= r.width - 1) and (r1.height + r2.height >= r.height - 1)


def spans(r1: Rect, r2: Rect, r: Rect, m: Model = Model.STANDARD) -> bool:
    """Whether ⟨r1 ∪ r2⟩ = r for two arbitrary rectangles."""
    if r1.contains(r2):
        return r1 == r
    if r2.contains(r1):
        return r2 == r
    return rect_union_closure(r1, r2, m) == r


def verify_pair(r: Rect, c: Configuration, pair, m: Model = Model.STANDARD) -> list[str]:
    """Problems with a claimed disjoint spanning pair; empty when all clauses hold."""
    r1, r2, k1, k2 = pair
    problems = []
    if r1 == r2:
        problems.append("rectangles are not distinct")
    if not (r.contains(r1) and r1 != r and r.contains(r2) and r2 != r):
        problems.append("inclusions are not strict")
    if not spans(r1, r2, r, m):
        problems.append("pair does not span r")
    if k1 & k2:
        problems.append("witnesses intersect")
    occ = c.occupied
    for rr, kk in ((r1, k1), (r2, k2)):
        if not kk or not kk <= occ:
            problems.append("witness contains vacant sites")
            continue
        if not all(rr.contains_site(s) for s in kk):
            problems.append("witness leaves its rectangle")
            continue
        if not closure(Configuration.from_sites(rr, kk), m).is_full():
            problems.append("witness does not span its rectangle")
    return problems


def overlap_forced(r: Rect, c: Configuration, m: Model = Model.STANDARD) -> bool:
    """True if r is spanned and every valid disjoint spanning pair overlaps.

    Enumerates every subset of the occupied sites of r whose closure is a
    rectangle, so it is only meant for a handful of occupied sites.
    """
    occ = sorted(c.restrict(r).occupied)
    if not is_internally_spanned(r, c, m) or r.area < 2:
        return False
    n = len(occ)
    spanned = []  # (rect, bitmask of occ)
    for mask in range(1, 1 << n):
        sub = [occ[i] for i in range(n) if mask >> i & 1]
        box = Rect.bounding(sub)
        if box == r:
            continue
        if closure(Configuration.from_sites(box, sub), m).is_full():
            spanned.append((box, mask))
    found_any = False
    for i, (ra, ma) in enumerate(spanned):
        for rb, mb in spanned[i + 1:]:
            if ma & mb or ra == rb or not spans(ra, rb, r, m):
                continue
            found_any = True
            if not ra.intersects(rb):
                return False
    return found_any
