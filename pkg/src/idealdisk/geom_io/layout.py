"""Developing a uniform structure into the Poincare disk."""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .. import angles as ang
from ..complex import TriangularDecomposition
from ..errors import CircumcircleDegenerate, NotConverged
from ..uniformize import UniformStructure, length_residual, side_lengths

PI = math.pi


# ---------------------------------------------------------------------------
# disk-model primitives


def mobius_to_origin(p: complex):
    """Isometry of the disk sending ``p`` to 0, and its inverse."""
    pc = p.conjugate()

    def fwd(z):
        return (z - p) / (1 - pc * z)

    def inv(z):
        return (z + p) / (1 + pc * z)

    return fwd, inv


def hyp_distance(z: complex, w: complex) -> float:
    num = abs(z - w)
    den = abs(1 - z.conjugate() * w)
    return 2.0 * math.atanh(min(num / den, 1.0))


def point_at(p: complex, toward: complex, dist: float, turn: float = 0.0) -> complex:
    """Point at distance ``dist`` from ``p``, rotated by ``turn`` from the ray ``p -> toward``."""
    fwd, inv = mobius_to_origin(p)
    q = fwd(toward)
    phi = cmath.phase(q) if q != 0 else 0.0
    return inv(math.tanh(0.5 * dist) * cmath.exp(1j * (phi + turn)))


def _side_of(p: complex, q: complex, z: complex) -> float:
    """Sign of ``z`` relative to the oriented geodesic ``p -> q``."""
    fwd, _ = mobius_to_origin(p)
    qq, zz = fwd(q), fwd(z)
    return (zz * qq.conjugate()).imag


def circumcircle(z1: complex, z2: complex, z3: complex) -> tuple[complex, float]:
    """Euclidean circle through three chart points."""
    ax, ay = z1.real, z1.imag
    bx, by = z2.real, z2.imag
    cx, cy = z3.real, z3.imag
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    scale = max(abs(z1 - z2), abs(z2 - z3), abs(z1 - z3)) ** 2
    if abs(d) <= 1e-14 * max(scale, 1e-300):
        raise CircumcircleDegenerate("chart points are collinear")
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    center = complex(ux, uy)
    return center, abs(z1 - center)


def circle_intersection_angle(c1: complex, r1: float, c2: complex, r2: float) -> float:
    """Intersection angle in the pattern convention: 0 for external tangency, pi for coincidence."""
    d2 = abs(c1 - c2) ** 2
    cos_val = (d2 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)
    return math.acos(max(-1.0, min(1.0, cos_val)))


# ---------------------------------------------------------------------------
# layouts


@dataclass
class DevelopedLayout:
    positions: dict[int, tuple[complex, complex, complex]]
    order: list[int]
    parent: dict[int, tuple[int, int, int]]  # child -> (parent triangle, parent side, child side)
    tree_defects: dict[int, float]  # edge -> mating defect along the tree
    holonomy_defects: dict[int, float]  # non-tree interior edge -> developing defect
    circles: dict[int, tuple[complex, float] | None] = field(default_factory=dict)

    @property
    def tree_edges(self) -> list[int]:
        return sorted(self.tree_defects)

    def side_points(self, t: int, side: int) -> tuple[complex, complex]:
        pts = self.positions[t]
        return pts[(side + 1) % 3], pts[(side + 2) % 3]


def _place_first(angles_t, lengths_t):
    # corner 0 at the origin, side 2 (corners 0-1) along the positive real axis
    z0 = 0j
    z1 = complex(math.tanh(0.5 * lengths_t[2]), 0.0)
    z2 = point_at(z0, z1, lengths_t[1], angles_t[0])
    return (z0, z1, z2)


def develop(td: TriangularDecomposition, u, *, tol: float = 1e-8) -> DevelopedLayout:
    """Lay the triangles of ``u`` out in the disk along a breadth-first dual tree.

    Each child triangle is rebuilt from its own side lengths, starting at one
    endpoint of the shared side, so the mismatch at the other endpoint (the
    tree defect) measures how well the two length assignments agree.
    """
    x = np.asarray(u.angles if isinstance(u, UniformStructure) else u, dtype=float)
    x = ang.as_angles(td, x)
    if td.F == 0:
        return DevelopedLayout({}, [], {}, {}, {})
    residual = length_residual(td, x)
    if residual > tol:
        raise NotConverged(f"edge lengths disagree by {residual:.3e}", residual=residual)
    A = x.reshape(-1, 3)
    L = side_lengths(x)

    positions = {0: _place_first(A[0], L[0])}
    order, parent, tree_defects = [0], {}, {}
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for i in range(3):
            s = 3 * t + i
            partner = td.side_partner[s]
            if partner is None:
                continue
            other, flip = partner
            t2, j = divmod(other, 3)
            if t2 in positions:
                continue
            p1, p2 = positions[t][(i + 1) % 3], positions[t][(i + 2) % 3]
            third = positions[t][i]
            # corner (i+1) of t meets corner (j+2) of t2 unless flipped
            if flip:
                a_idx, b_idx = (j + 1) % 3, (j + 2) % 3
            else:
                a_idx, b_idx = (j + 2) % 3, (j + 1) % 3
            pts = [None, None, None]
            pts[a_idx] = p1
            # rebuild t2 from its own lengths, anchored at p1 toward p2
            side_ab = 3 - a_idx - b_idx  # side of t2 joining a_idx and b_idx
            pts[b_idx] = point_at(p1, p2, L[t2, side_ab])
            sign = -1.0 if _side_of(p1, p2, third) > 0 else 1.0
            # corner j is opposite the shared side; its distance from a_idx is side b_idx
            pts[j] = point_at(p1, p2, L[t2, b_idx], sign * A[t2, a_idx])
            positions[t2] = tuple(pts)
            parent[t2] = (t, i, j)
            tree_defects[int(td.side_edge[s])] = hyp_distance(pts[b_idx], p2)
            order.append(t2)
            queue.append(t2)
        if not queue and len(positions) < td.F:
            # disconnected complex: start a new component at the origin
            t_new = next(k for k in range(td.F) if k not in positions)
            positions[t_new] = _place_first(A[t_new], L[t_new])
            order.append(t_new)
            queue.append(t_new)

    holonomy = {}
    for e in td.interior_edges:
        if e in tree_defects:
            continue
        s1, s2 = td.edges[e].sides
        (t1, i1), (t2, i2) = divmod(s1, 3), divmod(s2, 3)
        flip = td.side_partner[s1][1]
        a1, b1 = positions[t1][(i1 + 1) % 3], positions[t1][(i1 + 2) % 3]
        if flip:
            a2, b2 = positions[t2][(i2 + 1) % 3], positions[t2][(i2 + 2) % 3]
        else:
            a2, b2 = positions[t2][(i2 + 2) % 3], positions[t2][(i2 + 1) % 3]
        holonomy[e] = max(hyp_distance(a1, a2), hyp_distance(b1, b2))

    circles = {}
    for t, pts in positions.items():
        try:
            circles[t] = circumcircle(*pts)
        except CircumcircleDegenerate:
            circles[t] = None
    return DevelopedLayout(positions, order, parent, tree_defects, holonomy, circles)


def placed_side_lengths(layout: DevelopedLayout, t: int) -> np.ndarray:
    """Hyperbolic side lengths of triangle ``t`` as placed."""
    z = layout.positions[t]
    return np.array([hyp_distance(z[(i + 1) % 3], z[(i + 2) % 3]) for i in range(3)])


@dataclass
class EdgeCheck:
    edge: int
    triangles: tuple[int, int]
    measured: float
    expected: float
    halves: tuple[float, float]

    @property
    def error(self) -> float:
        return abs(self.measured - self.expected)


def verify_pattern(td: TriangularDecomposition, layout: DevelopedLayout, u) -> list[EdgeCheck]:
    """Compare circumcircle intersection angles with the pattern on every tree edge."""
    x = np.asarray(u.angles if isinstance(u, UniformStructure) else u, dtype=float)
    theta = ang.theta_edges(td, x)
    halves = 0.5 * PI - ang.psi_halves(x)
    out = []
    for child, (t, i, j) in sorted(layout.parent.items()):
        e = int(td.side_edge[3 * t + i])
        c1 = layout.circles.get(t) or circumcircle(*layout.positions[t])
        c2 = layout.circles.get(child) or circumcircle(*layout.positions[child])
        measured = circle_intersection_angle(c1[0], c1[1], c2[0], c2[1])
        out.append(
            EdgeCheck(
                edge=e,
                triangles=(t, child),
                measured=measured,
                expected=float(theta[e]),
                halves=(float(halves[3 * t + i]), float(halves[3 * child + j])),
            )
        )
    return out


@dataclass
class FlowerDevelopment:
    vertex: int
    spokes: list[complex]
    total_angle: float
    target: float
    spoke_mismatch: float
    closure_defect: float


def develop_flower(td: TriangularDecomposition, u, v: int) -> FlowerDevelopment:
    """Lay the flower of ``v`` around the origin using side lengths only.

    The angle at the center of each triangle comes from the hyperbolic law of
    cosines on its three sides; the total turning angle is read back from the
    placed spoke endpoints.  For a closed flower ``closure_defect`` is the
    distance between the last spoke, rotated back by the total angle, and the
    first.
    """
    x = np.asarray(u.angles if isinstance(u, UniformStructure) else u, dtype=float)
    L = side_lengths(ang.as_angles(td, x)).ravel()
    fl = td._flower(v)
    if not fl.in_sides:
        raise ValueError(f"vertex {v} has no ordered flower")
    spokes = [complex(math.tanh(0.5 * L[fl.in_sides[0]]), 0.0)]
    phase = total = mismatch = 0.0
    for k, c in enumerate(fl.corners):
        l_in, l_out, l_opp = L[fl.in_sides[k]], L[fl.out_sides[k]], L[c]
        if k:
            mismatch = max(mismatch, abs(L[fl.out_sides[k - 1]] - l_in))
        cos_g = (math.cosh(l_in) * math.cosh(l_out) - math.cosh(l_opp)) / (
            math.sinh(l_in) * math.sinh(l_out)
        )
        phase += math.acos(max(-1.0, min(1.0, cos_g)))
        z = cmath.rect(math.tanh(0.5 * l_out), phase)
        total += _turn(spokes[-1], z)
        spokes.append(z)
    closure = 0.0
    if fl.closed:
        mismatch = max(mismatch, abs(L[fl.out_sides[-1]] - L[fl.in_sides[0]]))
        closure = abs(spokes[-1] * cmath.exp(-1j * total) - spokes[0])
    return FlowerDevelopment(
        vertex=v,
        spokes=spokes,
        total_angle=total,
        target=float(td.vertex_targets[v]),
        spoke_mismatch=mismatch,
        closure_defect=closure,
    )


def _turn(z_from: complex, z_to: complex) -> float:
    """Counter-clockwise angle from one spoke direction to the next, in [0, 2 pi)."""
    a = cmath.phase(z_to / z_from)
    return a if a >= 0 else a + 2 * PI
