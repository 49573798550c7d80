"""Combinatorics of triangular decompositions.

A decomposition is given by ``F`` abstract triangles and a list of side
gluings.  Corners and sides are addressed by flat slot indices::

    corner c = 3*t + i      (corner i of triangle t)
    side   s = 3*t + i      (side i of triangle t, opposite corner i)

Side ``i`` joins corners ``i+1`` and ``i+2`` (mod 3), traversed in that order
when the triangle is oriented counter-clockwise.  Everything else (edges,
vertices, boundary, flowers) is derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DanglingSide, DuplicateGluing, InputError, NonManifold, UnknownVertex

__all__ = [
    "Gluing",
    "Edge",
    "Flower",
    "TriangularDecomposition",
    "ValidationReport",
    "build_decomposition",
    "validate",
    "flower",
]


@dataclass(frozen=True)
class Gluing:
    a: tuple[int, int]
    b: tuple[int, int]
    flip: bool = False


@dataclass(frozen=True)
class Edge:
    index: int
    sides: tuple[int, ...]  # flat side indices, lowest first

    @property
    def boundary(self) -> bool:
        return len(self.sides) == 1


@dataclass(frozen=True)
class Flower:
    """Corners around a vertex in walking order.

    ``edges`` lists the edge incidences met while walking, with multiplicity:
    one per crossed side for a closed flower, plus the two boundary sides at
    the ends of an open one.  ``in_sides``/``out_sides`` are empty when the
    corner orbit is not a single chain.
    """

    vertex: int
    corners: tuple[int, ...]
    closed: bool
    edges: tuple[int, ...]
    in_sides: tuple[int, ...] = ()  # per corner: flat side shared with the previous corner
    out_sides: tuple[int, ...] = ()  # per corner: flat side shared with the next corner


@dataclass(frozen=True, eq=False)
class TriangularDecomposition:
    triangle_count: int
    gluings: tuple[Gluing, ...]
    side_partner: tuple  # per side: (other side, flip) or None
    edges: tuple[Edge, ...]
    side_edge: np.ndarray
    corner_vertex: np.ndarray
    flowers: tuple[Flower, ...]
    vertex_targets: np.ndarray
    problems: tuple[str, ...] = field(default=())

    @property
    def F(self) -> int:
        return self.triangle_count

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def V(self) -> int:
        return len(self.flowers)

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    @property
    def boundary_edges(self) -> list[int]:
        return [e.index for e in self.edges if e.boundary]

    @property
    def interior_edges(self) -> list[int]:
        return [e.index for e in self.edges if not e.boundary]

    @property
    def boundary_vertices(self) -> list[int]:
        return [f.vertex for f in self.flowers if not f.closed]

    def is_boundary_vertex(self, v: int) -> bool:
        return not self._flower(v).closed

    def triangle_edges(self, t: int) -> tuple[int, int, int]:
        """Edge ids of sides 0, 1, 2 of triangle ``t``."""
        return tuple(int(e) for e in self.side_edge[3 * t : 3 * t + 3])

    def triangle_vertices(self, t: int) -> tuple[int, int, int]:
        return tuple(int(v) for v in self.corner_vertex[3 * t : 3 * t + 3])

    def default_targets(self) -> np.ndarray:
        return np.array([math.pi if not f.closed else 2 * math.pi for f in self.flowers])

    def with_targets(self, targets) -> "TriangularDecomposition":
        return _replace_targets(self, _coerce_targets(self, targets))

    def _flower(self, v: int) -> Flower:
        if not (0 <= v < self.V):
            raise UnknownVertex(f"vertex {v} out of range 0..{self.V - 1}")
        return self.flowers[v]

    def to_spec(self) -> dict:
        """Gluing description accepted by :func:`build_decomposition`."""
        doc = {
            "triangles": self.F,
            "gluings": [
                {"a": list(g.a), "b": list(g.b), **({"flip": True} if g.flip else {})}
                for g in self.gluings
            ],
        }
        if not np.allclose(self.vertex_targets, self.default_targets(), rtol=0, atol=0):
            doc["vertex_targets"] = {str(v): float(x) for v, x in enumerate(self.vertex_targets)}
        return doc


def _corner_pairs(side: int, other: int, flip: bool) -> list[tuple[int, int]]:
    """Corner identifications induced by gluing flat side ``side`` to ``other``."""
    t, i = divmod(side, 3)
    t2, j = divmod(other, 3)
    c1, c2 = 3 * t + (i + 1) % 3, 3 * t + (i + 2) % 3
    d1, d2 = 3 * t2 + (j + 1) % 3, 3 * t2 + (j + 2) % 3
    if flip:
        return [(c1, d1), (c2, d2)]
    return [(c1, d2), (c2, d1)]


def _across(side_partner, corner: int, side: int):
    """Cross ``side`` from ``corner``; return (corner', entry side') or None at boundary."""
    partner = side_partner[side]
    if partner is None:
        return None
    other, flip = partner
    for c, d in _corner_pairs(side, other, flip):
        if c == corner:
            return d, other
    raise AssertionError("corner not on side")


def _other_side(corner: int, side: int) -> int:
    t, i = divmod(corner, 3)
    a, b = 3 * t + (i + 1) % 3, 3 * t + (i + 2) % 3
    return b if side == a else a


def _walk(side_partner, start: int, out_side: int):
    """Walk corners from ``start`` leaving through ``out_side``.

    Returns ``(steps, end)``: ``steps`` are ``(corner, entry side, exit side)``
    for every corner after ``start``; ``end`` is ``"closed"`` when the walk
    returns to ``start`` through its other side, ``"boundary"`` when the last
    exit side is unglued, or ``"bad"`` otherwise.
    """
    steps = []
    cur, out = start, out_side
    seen = {start}
    while True:
        step = _across(side_partner, cur, out)
        if step is None:
            return steps, "boundary"
        nxt, entry = step
        if nxt == start:
            ok = entry == _other_side(start, out_side) and entry != out_side
            return steps, "closed" if ok else "bad"
        if nxt in seen:
            return steps, "bad"
        seen.add(nxt)
        out = _other_side(nxt, entry)
        steps.append((nxt, entry, out))
        cur = nxt


def _parse_gluing(item) -> Gluing:
    if isinstance(item, Gluing):
        return item
    if isinstance(item, Mapping):
        try:
            a, b = item["a"], item["b"]
        except KeyError as exc:
            raise DanglingSide(f"gluing {item!r} missing key {exc}") from None
        flip = bool(item.get("flip", False))
    else:
        item = tuple(item)
        if len(item) not in (2, 3):
            raise DanglingSide(f"gluing {item!r} must have two sides and an optional flip flag")
        a, b = item[0], item[1]
        flip = bool(item[2]) if len(item) == 3 else False
    try:
        if len(a) != 2 or len(b) != 2:
            raise TypeError
        a = (int(a[0]), int(a[1]))
        b = (int(b[0]), int(b[1]))
    except (TypeError, ValueError, IndexError):
        raise DanglingSide(f"malformed gluing {item!r}") from None
    return Gluing(a, b, flip)


def _coerce_targets(td_or_flowers, targets) -> np.ndarray:
    flowers = td_or_flowers.flowers if hasattr(td_or_flowers, "flowers") else td_or_flowers
    out = np.array([math.pi if not f.closed else 2 * math.pi for f in flowers])
    if targets is None:
        return out
    if isinstance(targets, Mapping):
        for key, val in targets.items():
            try:
                v = int(key)
            except (TypeError, ValueError):
                v = -1
            if not (0 <= v < len(flowers)):
                raise UnknownVertex(f"vertex target for unknown vertex {key!r}")
            out[v] = float(val)
    else:
        arr = np.asarray(targets, dtype=float)
        if arr.shape != out.shape:
            raise InputError(f"expected {out.size} vertex targets, got {arr.size}")
        out = arr.copy()
    if not np.all(np.isfinite(out)) or np.any(out <= 0):
        raise InputError("vertex targets must be finite and positive")
    return out


def _replace_targets(td: TriangularDecomposition, targets: np.ndarray) -> TriangularDecomposition:
    from dataclasses import replace

    return replace(td, vertex_targets=targets)


def build_decomposition(
    triangles: int,
    gluings: Iterable = (),
    vertex_targets=None,
    *,
    strict: bool = True,
) -> TriangularDecomposition:
    """Build a decomposition from a triangle count and side gluings.

    Gluings are ``{"a": [t, s], "b": [t2, s2], "flip": bool}`` mappings or
    ``((t, s), (t2, s2)[, flip])`` tuples.  The default identification
    reverses orientation, so an all-default gluing of consistently oriented
    triangles is orientable.

    With ``strict=False`` manifold failures are recorded on the result for
    :func:`validate` to report instead of raising :class:`NonManifold`.
    """
    F = int(triangles)
    if F < 0:
        raise InputError("triangle count must be nonnegative")
    parsed = tuple(_parse_gluing(g) for g in gluings)

    side_partner: list = [None] * (3 * F)
    problems: list[str] = []
    used: set[int] = set()
    for g in parsed:
        for t, s in (g.a, g.b):
            if not (0 <= t < F and 0 <= s < 3):
                raise DanglingSide(f"side ({t}, {s}) out of range for {F} triangles")
        sa, sb = 3 * g.a[0] + g.a[1], 3 * g.b[0] + g.b[1]
        if sa == sb:
            if sa in used:
                raise DuplicateGluing(f"side {g.a} glued more than once")
            used.add(sa)
            problems.append(f"side {g.a} glued to itself")
            side_partner[sa] = (sa, g.flip)
            continue
        for s, tag in ((sa, g.a), (sb, g.b)):
            if s in used:
                raise DuplicateGluing(f"side {tag} glued more than once")
            used.add(s)
        side_partner[sa] = (sb, g.flip)
        side_partner[sb] = (sa, g.flip)

    # edges, ordered by their lowest side
    side_edge = np.full(3 * F, -1, dtype=int)
    edges: list[Edge] = []
    for s in range(3 * F):
        if side_edge[s] >= 0:
            continue
        p = side_partner[s]
        sides = (s,) if p is None or p[0] == s else (s, p[0])
        k = len(edges)
        edges.append(Edge(k, sides))
        for x in sides:
            side_edge[x] = k

    # corner orbits, independent of the flower walk
    rows, cols = [], []
    for s in range(3 * F):
        p = side_partner[s]
        if p is None or p[0] < s:
            continue
        for c, d in _corner_pairs(s, p[0], p[1]):
            rows.append(c)
            cols.append(d)
    n = 3 * F
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False) if n else (0, np.zeros(0, int))

    orbit_first: dict[int, int] = {}
    for c in range(n):
        orbit_first.setdefault(int(labels[c]), c)
    order = sorted(orbit_first, key=orbit_first.__getitem__)
    vertex_of_label = {lab: v for v, lab in enumerate(order)}
    corner_vertex = np.array([vertex_of_label[int(labels[c])] for c in range(n)], dtype=int)

    flowers: list[Flower] = []
    for v, lab in enumerate(order):
        orbit = [c for c in range(n) if labels[c] == lab]
        start = orbit[0]
        t, i = divmod(start, 3)
        first_out = 3 * t + (i + 1) % 3
        back_out = 3 * t + (i + 2) % 3
        fwd, end = _walk(side_partner, start, first_out)
        steps = [(start, back_out, first_out)] + fwd
        closed = end == "closed"
        if end == "boundary":
            bwd, end2 = _walk(side_partner, start, back_out)
            if end2 != "boundary":
                end = "bad"
            # walked backwards: entry and exit swap roles
            steps = [(c, o, e) for c, e, o in reversed(bwd)] + steps
        chain = [c for c, _, _ in steps]
        in_sides = tuple(e for _, e, _ in steps)
        out_sides = tuple(o for _, _, o in steps)
        inc_sides = list(out_sides) if closed else [in_sides[0], *out_sides]
        inc_edges = tuple(int(side_edge[s]) for s in inc_sides)
        if end == "bad" or sorted(chain) != orbit:
            problems.append(f"corner orbit of vertex {v} is not a single chain")
            chain, in_sides, out_sides, closed = orbit, (), (), False
        flowers.append(Flower(v, tuple(chain), closed, inc_edges, in_sides, out_sides))

    problems = tuple(dict.fromkeys(problems))
    if strict and problems:
        raise NonManifold("; ".join(problems))

    td = TriangularDecomposition(
        triangle_count=F,
        gluings=parsed,
        side_partner=tuple(side_partner),
        edges=tuple(edges),
        side_edge=side_edge,
        corner_vertex=corner_vertex,
        flowers=tuple(flowers),
        vertex_targets=np.zeros(len(flowers)),
        problems=problems,
    )
    return _replace_targets(td, _coerce_targets(flowers, vertex_targets))


@dataclass
class ValidationReport:
    ok: bool
    chi: int
    V: int
    E: int
    F: int
    boundary_edges: int
    boundary_vertices: int
    checks: dict[str, bool]
    failures: list[str]
    messages: list[str]
    admissible: bool

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "chi": self.chi,
            "V": self.V,
            "E": self.E,
            "F": self.F,
            "boundary_edges": self.boundary_edges,
            "boundary_vertices": self.boundary_vertices,
            "checks": dict(self.checks),
            "failures": list(self.failures),
            "messages": list(self.messages),
            "admissible": self.admissible,
        }


def validate(td: TriangularDecomposition) -> ValidationReport:
    """Check the structural invariants of ``td`` and report, never raise.

    Admissibility (sum of vertex targets below ``pi * F``) is reported but does
    not affect ``ok``; it only matters once angles are involved.
    """
    n_side = 3 * td.F
    side_count = np.zeros(n_side, dtype=int)
    for e in td.edges:
        for s in set(e.sides):
            side_count[s] += 1
    no_self = all(len(set(e.sides)) == len(e.sides) for e in td.edges) and not any(
        "itself" in p for p in td.problems
    )
    single_chain = not any("single chain" in p for p in td.problems)
    nbe = len(td.boundary_edges)
    checks = {
        "sides_partitioned": bool(np.all(side_count == 1)),
        "no_self_glued_side": no_self,
        "corner_orbits_single_chain": single_chain,
        "count_identity": 3 * td.F == 2 * td.E - nbe,
        "flower_lengths_sum": sum(len(f.corners) for f in td.flowers) == n_side,
    }
    failures = []
    if not (no_self and single_chain):
        failures.append(NonManifold.code)
    if not (checks["sides_partitioned"] and checks["count_identity"] and checks["flower_lengths_sum"]):
        failures.append("InvariantViolated")
    return ValidationReport(
        ok=all(checks.values()),
        chi=td.euler_characteristic,
        V=td.V,
        E=td.E,
        F=td.F,
        boundary_edges=nbe,
        boundary_vertices=len(td.boundary_vertices),
        checks=checks,
        failures=failures,
        messages=list(td.problems),
        admissible=bool(np.sum(td.vertex_targets) < math.pi * td.F),
    )


def flower(td: TriangularDecomposition, v: int) -> list[tuple[int, int]]:
    """Ordered ``(triangle, corner)`` pairs around vertex ``v``.

    Cyclic for interior vertices; for boundary vertices the chain starts and
    ends at the triangles carrying the two boundary sides.
    """
    return [divmod(c, 3) for c in td._flower(v).corners]


def vertex_edge_incidences(td: TriangularDecomposition, v: int) -> Sequence[int]:
    """Edges at ``v`` counted as in the universal cover (loops appear twice)."""
    return td._flower(v).edges
