"""Configurations on rectangles under the two bootstrap update rules.

Coordinates are absolute integers. A :class:`Configuration` stores its
occupancy as a boolean array indexed ``grid[x - x_min, y - y_min]``; every
operation treats sites outside the domain as permanently vacant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from bootperc import _kernels

INFINITY = math.inf


class Site(NamedTuple):
    x: int
    y: int


class Model(enum.Enum):
    STANDARD = "standard"
    MODIFIED = "modified"


class Direction(enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    EAST = "east"
    NORTH = "north"


@dataclass(frozen=True, order=True)
class Rect:
    """Integer rectangle ``{x_min..x_max} x {y_min..y_max}``."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"empty or inverted rectangle {tuple(self)}")

    @classmethod
    def from_dims(cls, m: int, n: int, x0: int = 1, y0: int = 1) -> "Rect":
        """``R(m, n)`` placed with lower-left corner ``(x0, y0)``."""
        return cls(x0, y0, x0 + m - 1, y0 + n - 1)

    @classmethod
    def bounding(cls, sites: Iterable[tuple[int, int]]) -> "Rect":
        xs, ys = zip(*sites)
        return cls(min(xs), min(ys), max(xs), max(ys))

    def __iter__(self) -> Iterator[int]:
        yield from (self.x_min, self.y_min, self.x_max, self.y_max)

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def dims(self) -> tuple[int, int]:
        return (self.width, self.height)

    @property
    def short(self) -> int:
        return min(self.dims)

    @property
    def long(self) -> int:
        return max(self.dims)

    @property
    def phi(self) -> int:
        """Semi-perimeter, width plus height."""
        return self.width + self.height

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains_site(self, s: tuple[int, int]) -> bool:
        return self.x_min <= s[0] <= self.x_max and self.y_min <= s[1] <= self.y_max

    def contains(self, other: "Rect") -> bool:
        return (self.x_min <= other.x_min and self.y_min <= other.y_min
                and other.x_max <= self.x_max and other.y_max <= self.y_max)

    def intersects(self, other: "Rect") -> bool:
        return not (other.x_max < self.x_min or self.x_max < other.x_min
                    or other.y_max < self.y_min or self.y_max < other.y_min)

    def hull(self, other: "Rect") -> "Rect":
        return Rect(min(self.x_min, other.x_min), min(self.y_min, other.y_min),
                    max(self.x_max, other.x_max), max(self.y_max, other.y_max))

    def sites(self) -> Iterator[Site]:
        for x in range(self.x_min, self.x_max + 1):
            for y in range(self.y_min, self.y_max + 1):
                yield Site(x, y)

    def translate(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)


class Configuration:
    """Occupied sites of a rectangular domain.

    Instances are treated as immutable: the occupancy array is made read-only
    on construction and every operation returns a new configuration.
    """

    __slots__ = ("domain", "grid")

    def __init__(self, domain: Rect, grid: np.ndarray):
        grid = np.asarray(grid, dtype=bool)
        if grid.shape != domain.dims:
            raise ValueError(f"grid shape {grid.shape} does not match domain dims {domain.dims}")
        grid = grid.copy()
        grid.setflags(write=False)
        self.domain = domain
        self.grid = grid

    @classmethod
    def empty(cls, domain: Rect) -> "Configuration":
        return cls(domain, np.zeros(domain.dims, dtype=bool))

    @classmethod
    def full(cls, domain: Rect) -> "Configuration":
        return cls(domain, np.ones(domain.dims, dtype=bool))

    @classmethod
    def from_sites(cls, domain: Rect, sites: Iterable[tuple[int, int]]) -> "Configuration":
        grid = np.zeros(domain.dims, dtype=bool)
        for s in sites:
            if not domain.contains_site(s):
                raise ValueError(f"site {tuple(s)} outside domain {tuple(domain)}")
            grid[s[0] - domain.x_min, s[1] - domain.y_min] = True
        return cls(domain, grid)

    @property
    def occupied(self) -> frozenset[Site]:
        xs, ys = np.nonzero(self.grid)
        return frozenset(Site(int(x) + self.domain.x_min, int(y) + self.domain.y_min)
                         for x, y in zip(xs, ys))

    def __contains__(self, s: tuple[int, int]) -> bool:
        return self.domain.contains_site(s) and bool(
            self.grid[s[0] - self.domain.x_min, s[1] - self.domain.y_min])

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.grid, other.grid)

    def __hash__(self):
        return hash((self.domain, self.grid.tobytes()))

    def __repr__(self):
        return f"Configuration({tuple(self.domain)}, occupied={int(self.grid.sum())})"

    def count(self) -> int:
        return int(self.grid.sum())

    def is_full(self) -> bool:
        return bool(self.grid.all())

    def view(self, r: Rect) -> np.ndarray:
        """Occupancy array of the sub-rectangle ``r`` (which must lie in the domain)."""
        if not self.domain.contains(r):
            raise ValueError(f"rectangle {tuple(r)} not inside domain {tuple(self.domain)}")
        ox, oy = r.x_min - self.domain.x_min, r.y_min - self.domain.y_min
        return self.grid[ox:ox + r.width, oy:oy + r.height]

    def restrict(self, r: Rect) -> "Configuration":
        """``occupied ∩ r`` as a configuration on domain ``r``."""
        return Configuration(r, self.view(r))

    def issubset(self, other: "Configuration") -> bool:
        if self.domain != other.domain:
            raise ValueError("configurations have different domains")
        return not np.any(self.grid & ~other.grid)

    # text format: "w h" header, then rows from y_max down to y_min
    def to_text(self) -> str:
        w, h = self.domain.dims
        lines = [f"{w} {h}"]
        for y in range(h - 1, -1, -1):
            lines.append("".join("1" if v else "0" for v in self.grid[:, y]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, x0: int = 1, y0: int = 1) -> "Configuration":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        try:
            w, h = (int(v) for v in lines[0].split())
        except (IndexError, ValueError):
            raise ValueError("configuration header must be 'w h'") from None
        rows = lines[1:]
        if len(rows) != h or any(len(row) != w or set(row) - {"0", "1"} for row in rows):
            raise ValueError(f"expected {h} rows of {w} characters from {{0,1}}")
        grid = np.zeros((w, h), dtype=bool)
        for i, row in enumerate(rows):
            grid[:, h - 1 - i] = [c == "1" for c in row]
        return cls(Rect.from_dims(w, h, x0, y0), grid)


def _neighbour_counts(grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis active-neighbour counts with a vacant boundary."""
    g = grid.astype(np.int8)
    horiz = np.zeros_like(g)
    vert = np.zeros_like(g)
    horiz[1:, :] += g[:-1, :]
    horiz[:-1, :] += g[1:, :]
    vert[:, 1:] += g[:, :-1]
    vert[:, :-1] += g[:, 1:]
    return horiz, vert


def bootstrap_step(c: Configuration, m: Model = Model.STANDARD) -> Configuration:
    """One synchronous application of B (or B') inside the domain."""
    horiz, vert = _neighbour_counts(c.grid)
    if m is Model.MODIFIED:
        fire = (horiz >= 1) & (vert >= 1)
    else:
        fire = horiz + vert >= 2
    return Configuration(c.domain, c.grid | fire)


def _times(c: Configuration, m: Model) -> np.ndarray:
    return _kernels.activation_times(np.ascontiguousarray(c.grid), m is Model.MODIFIED)


def closure(c: Configuration, m: Model = Model.STANDARD) -> Configuration:
    """Least fixed point of the update rule containing the occupied set."""
    return Configuration(c.domain, _times(c, m) != _kernels.NEVER)


def activation_times(c: Configuration, m: Model = Model.STANDARD) -> np.ndarray:
    """Array of activation times aligned with ``c.grid``; -1 marks never-active sites."""
    return _times(c, m)


def activation_time(c: Configuration, s: tuple[int, int], m: Model = Model.STANDARD) -> float:
    """Least t with s in B^t(occupied); ``math.inf`` if s is never activated."""
    if not c.domain.contains_site(s):
        raise ValueError(f"site {tuple(s)} outside domain")
    t = _times(c, m)[s[0] - c.domain.x_min, s[1] - c.domain.y_min]
    return INFINITY if t == _kernels.NEVER else int(t)


def is_internally_spanned(r: Rect, c: Configuration, m: Model = Model.STANDARD) -> bool:
    return closure(c.restrict(r), m).is_full()


def closure_is_full(grid: np.ndarray, m: Model = Model.STANDARD) -> bool:
    """Fast path: whether the closure of a raw occupancy array fills its box."""
    t = _kernels.activation_times(np.ascontiguousarray(grid, dtype=bool), m is Model.MODIFIED)
    return bool((t != _kernels.NEVER).all())


def no_double_gap(seq) -> bool:
    seq = np.asarray(seq, dtype=bool)
    return not np.any(~seq[:-1] & ~seq[1:]) if seq.size > 1 else True


def is_traversable(r: Rect | None, c: Configuration, direction: Direction) -> bool:
    """Traversability of ``r`` using the occupied sites of ``c``.

    ``r=None`` stands for an empty rectangle and is vacuously traversable.
    """
    if r is None:
        return True
    block = c.view(r)
    if direction in (Direction.HORIZONTAL, Direction.EAST):
        lines = block.any(axis=1)
    else:
        lines = block.any(axis=0)
    if not no_double_gap(lines):
        return False
    if direction in (Direction.EAST, Direction.NORTH):
        return bool(lines[-1])
    return True
