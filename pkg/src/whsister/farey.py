"""Walks in the Farey triangulation from the initial triangle ``{3/1, 4/1, 1/0}``.

Each crossing of a Farey edge is a layered tetrahedron, except the last one,
which becomes the folding edge of the layered solid torus.  All geometry is
done with exact integer determinants on canonical representatives
(``q >= 0``, and ``1/0`` for infinity).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateLST, InitialVertex, NotNeighbors, SlopeError, ZeroSlope


@dataclass(frozen=True, order=True)
class Slope:
    """A reduced slope ``p/q`` with ``q >= 0``; ``1/0`` is the only slope with ``q = 0``."""

    p: int
    q: int

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1 or self.q < 0 or (self.q == 0 and self.p != 1):
            raise ValueError(f"({self.p}, {self.q}) is not a canonical slope; use reduce_slope")

    def __str__(self):
        return f"{self.p}/{self.q}"

    def __repr__(self):
        return f"Slope({self.p}/{self.q})"

    @property
    def is_infinite(self):
        return self.q == 0

    def position(self):
        """Place on the circle ``Q ∪ {∞}``; infinity sorts last."""
        return (1, Fraction(0)) if self.q == 0 else (0, Fraction(self.p, self.q))


def reduce_slope(p, q):
    """Canonical representative of ``p/q``; ``(p, q)`` and ``(-p, -q)`` agree."""
    if p == 0 and q == 0:
        raise ZeroSlope("0/0 is not a slope")
    g = math.gcd(p, q)
    p, q = p // g, q // g
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    return Slope(p, q)


_SLOPE_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def parse_slope(text):
    """Parse ``"p/q"``, ``"p"`` (meaning ``p/1``) or ``"1/0"``."""
    if isinstance(text, Slope):
        return text
    m = _SLOPE_RE.match(str(text))
    if not m:
        raise SlopeError(f"cannot parse slope {text!r}")
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) is not None else 1
    return reduce_slope(p, q)


def det(u, v):
    return u.p * v.q - u.q * v.p


def are_neighbors(u, v):
    return abs(det(u, v)) == 1


def edge_completions(e):
    """Third vertices of the two Farey triangles on edge ``e``: ``u+v`` and ``u-v``."""
    u, v = e
    if not are_neighbors(u, v):
        raise NotNeighbors(f"{u} and {v} are not Farey neighbors")
    return reduce_slope(u.p + v.p, u.q + v.q), reduce_slope(u.p - v.p, u.q - v.q)


def _side(x, u, v):
    return det(x, u) * det(x, v)


def beyond(x, edge, w):
    """True when ``x`` lies across ``edge`` from the vertex ``w``."""
    u, v = edge
    return _side(x, u, v) * _side(w, u, v) < 0


def cyclic_order(*slopes):
    """True when the slopes occur in this cyclic order going up the real line
    (through infinity and back)."""
    keys = [s.position() for s in slopes]
    start = keys.index(min(keys))
    rotated = keys[start:] + keys[:start]
    return all(a < b for a, b in zip(rotated, rotated[1:]))


@dataclass(frozen=True)
class FareyTriangle:
    vertices: frozenset

    def __post_init__(self):
        vs = list(self.vertices)
        if len(vs) != 3 or not all(
            are_neighbors(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]
        ):
            raise NotNeighbors(f"{sorted(vs)} is not a Farey triangle")

    @classmethod
    def of(cls, *slopes):
        return cls(frozenset(slopes))

    def __contains__(self, s):
        return s in self.vertices


INITIAL_TRIANGLE = (Slope(3, 1), Slope(4, 1), Slope(1, 0))


@dataclass(frozen=True)
class WalkStep:
    crossed_edge: tuple
    old: Slope
    heading: Slope
    pivot: Slope
    fan: Slope
    turn: str  # "initial", "L" or "R"

    def as_dict(self):
        return {
            "crossed_edge": [str(s) for s in self.crossed_edge],
            "old": str(self.old),
            "heading": str(self.heading),
            "pivot": str(self.pivot),
            "fan": str(self.fan),
            "turn": self.turn,
        }


@dataclass(frozen=True)
class Walk:
    steps: tuple
    fold_edge: tuple  # (pivot, fan) of the folding move
    target: Slope

    @property
    def headings(self):
        return [s.heading for s in self.steps]

    @property
    def turns(self):
        return "".join(s.turn for s in self.steps[1:])

    def __len__(self):
        return len(self.steps)

    def as_dict(self):
        return {
            "target": str(self.target),
            "steps": [s.as_dict() for s in self.steps],
            "fold_edge": [str(s) for s in self.fold_edge],
            "turns": self.turns,
        }


def _crossings(target, initial):
    """Raw sequence of (edge, old, new) crossings ending at the triangle with target."""
    tri = list(initial)
    if target in tri:
        raise InitialVertex(f"{target} is a vertex of the initial triangle")
    out = []
    while target not in tri:
        for k in range(3):
            w = tri[k]
            edge = (tri[(k + 1) % 3], tri[(k + 2) % 3])
            if beyond(target, edge, w):
                break
        else:  # pragma: no cover - a Farey triangle always has a separating edge
            raise AssertionError(f"no edge of {tri} separates {target}")
        a, b = edge_completions(edge)
        new = b if a == w else a
        out.append((edge, w, new))
        tri = [edge[0], edge[1], new]
    return out


def _shared(e1, e2):
    common = set(e1) & set(e2)
    if len(common) != 1:
        raise AssertionError(f"edges {e1} and {e2} do not share exactly one vertex")
    return common.pop()


def _label(k, crossing, prev_edge):
    edge, old, new = crossing
    if k == 0:
        # fan on the left, pivot on the right when travelling old -> heading
        x, y = edge
        if cyclic_order(old, x, new, y):
            fan, pivot = x, y
        else:
            fan, pivot = y, x
        return pivot, fan, "initial"
    pivot = _shared(prev_edge, edge)
    fan = edge[1] if edge[0] == pivot else edge[0]
    turn = "L" if cyclic_order(old, pivot, new, fan) else "R"
    return pivot, fan, turn


def walk_to(target, initial=INITIAL_TRIANGLE):
    """Layering data for filling along ``target``.

    Raises :class:`InitialVertex` for the three initial slopes and
    :class:`DegenerateLST` when no tetrahedron would be layered.
    """
    target = parse_slope(target)
    crossings = _crossings(target, initial)
    if len(crossings) < 2:
        raise DegenerateLST(
            f"filling along {target} gives a degenerate layered solid torus"
        )
    steps = []
    prev_edge = None
    for k, c in enumerate(crossings[:-1]):
        pivot, fan, turn = _label(k, c, prev_edge)
        edge, old, new = c
        steps.append(WalkStep(edge, old, new, pivot, fan, turn))
        prev_edge = edge
    fold_pivot, fold_fan, _ = _label(len(crossings) - 1, crossings[-1], prev_edge)
    return Walk(tuple(steps), (fold_pivot, fold_fan), target)


def walk_from_dict(data):
    """Inverse of :meth:`Walk.as_dict`."""
    steps = tuple(
        WalkStep(
            tuple(parse_slope(x) for x in s["crossed_edge"]),
            parse_slope(s["old"]),
            parse_slope(s["heading"]),
            parse_slope(s["pivot"]),
            parse_slope(s["fan"]),
            s["turn"],
        )
        for s in data["steps"]
    )
    return Walk(steps, tuple(parse_slope(x) for x in data["fold_edge"]), parse_slope(data["target"]))
