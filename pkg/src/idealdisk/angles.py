"""Linear algebra of angle systems on a triangular decomposition.

Angle vectors are plain float arrays of length ``3F`` indexed by corner
slot.  Covectors are sparse ``{corner: coefficient}`` maps; the dense
matrices built here stack them for vectorized work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex import TriangularDecomposition
from .errors import BasisVerificationFailed, EdgeNotInTriangle, UnknownVertex, WrongLength

PI = math.pi
HALF_PI = 0.5 * math.pi

V_TOL = 1e-9


class Covector(dict):
    """Sparse linear functional on corner slots."""

    def __call__(self, x) -> float:
        # fixed (sorted) order keeps evaluation deterministic
        return float(sum(coef * x[c] for c, coef in sorted(self.items())))

    def __add__(self, other: "Covector") -> "Covector":
        out = Covector(self)
        for c, coef in other.items():
            out[c] = out.get(c, 0.0) + coef
        return out

    def dense(self, n: int) -> np.ndarray:
        row = np.zeros(n)
        for c, coef in self.items():
            row[c] += coef
        return row


def as_angles(td: TriangularDecomposition, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (3 * td.F,):
        raise WrongLength(f"expected {3 * td.F} corner angles, got shape {x.shape}")
    return x


def _side_corners(side: int) -> tuple[int, int, int]:
    """(opposite corner, adjacent corner, adjacent corner) of a flat side index."""
    t, i = divmod(side, 3)
    return side, 3 * t + (i + 1) % 3, 3 * t + (i + 2) % 3


# ---------------------------------------------------------------------------
# covectors


def vertex_covector(td: TriangularDecomposition, v: int) -> Covector:
    if not (0 <= v < td.V):
        raise UnknownVertex(f"vertex {v} out of range")
    return Covector({c: 1.0 for c in td.flowers[v].corners})


def triangle_covector(t: int) -> Covector:
    return Covector({3 * t: 1.0, 3 * t + 1: 1.0, 3 * t + 2: 1.0})


def psi_half_covector(side: int) -> Covector:
    opp, b, c = _side_corners(side)
    return Covector({opp: -0.5, b: 0.5, c: 0.5})


def psi_covector(td: TriangularDecomposition, e: int) -> Covector:
    out = Covector()
    for s in td.edges[e].sides:
        out = out + psi_half_covector(s)
    return out


# ---------------------------------------------------------------------------
# scalar evaluations


def vertex_sum(td: TriangularDecomposition, x, v: int) -> float:
    """Sum of the angles in the flower of ``v``."""
    return vertex_covector(td, v)(as_angles(td, x))


def vertex_sums(td: TriangularDecomposition, x) -> np.ndarray:
    x = as_angles(td, x)
    out = np.zeros(td.V)
    np.add.at(out, td.corner_vertex, x)
    return out


def triangle_curvature(x, t: int) -> float:
    """``A + B + C - pi`` for triangle ``t``."""
    return float(x[3 * t] + x[3 * t + 1] + x[3 * t + 2] - PI)


def curvatures(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x.reshape(-1, 3).sum(axis=1) - PI


def psi_half_side(x, side: int) -> float:
    """``(B + C - A) / 2`` with ``A`` the angle opposite flat side ``side``."""
    opp, b, c = _side_corners(side)
    return 0.5 * (x[b] + x[c] - x[opp])


def psi_half(td: TriangularDecomposition, x, t: int, e: int) -> float:
    """Half-term of edge ``e`` from triangle ``t``."""
    sides = [s for s in td.edges[e].sides if s // 3 == t]
    if not sides:
        raise EdgeNotInTriangle(f"edge {e} is not a side of triangle {t}")
    if len(sides) > 1:
        raise EdgeNotInTriangle(
            f"edge {e} occupies two sides of triangle {t}; use psi_half_side"
        )
    return float(psi_half_side(as_angles(td, x), sides[0]))


def psi_halves(x) -> np.ndarray:
    """All half-terms, indexed by flat side."""
    a = np.asarray(x, dtype=float).reshape(-1, 3)
    s = a.sum(axis=1, keepdims=True)
    return (0.5 * (s - 2 * a)).ravel()


def psi_edges(td: TriangularDecomposition, x) -> np.ndarray:
    halves = psi_halves(as_angles(td, x))
    out = np.zeros(td.E)
    np.add.at(out, td.side_edge, halves)
    return out


def boundary_mask(td: TriangularDecomposition) -> np.ndarray:
    return np.array([e.boundary for e in td.edges], dtype=bool)


def theta_from_psi(td: TriangularDecomposition, psi) -> np.ndarray:
    return np.where(boundary_mask(td), HALF_PI, PI) - np.asarray(psi, dtype=float)


def psi_from_theta(td: TriangularDecomposition, theta) -> np.ndarray:
    return np.where(boundary_mask(td), HALF_PI, PI) - np.asarray(theta, dtype=float)


def theta_edges(td: TriangularDecomposition, x) -> np.ndarray:
    return theta_from_psi(td, psi_edges(td, x))


def psi_edge(td: TriangularDecomposition, x, e: int) -> float:
    return psi_covector(td, e)(as_angles(td, x))


def theta_edge(td: TriangularDecomposition, x, e: int) -> float:
    base = HALF_PI if td.edges[e].boundary else PI
    return base - psi_edge(td, x, e)


# ---------------------------------------------------------------------------
# matrices


def psi_matrix(td: TriangularDecomposition) -> np.ndarray:
    """``E x 3F`` matrix of the pattern map."""
    n = 3 * td.F
    return np.array([psi_covector(td, e).dense(n) for e in range(td.E)]).reshape(td.E, n)


def vertex_matrix(td: TriangularDecomposition) -> np.ndarray:
    m = np.zeros((td.V, 3 * td.F))
    m[td.corner_vertex, np.arange(3 * td.F)] = 1.0
    return m


@dataclass
class ConformalBasis:
    """Deformation vectors ``w_e`` (interior edges) and dual vectors ``m_e`` (all edges).

    ``W[:, k]`` is the deformation for ``interior[k]``: +1 on the two corners
    beside the edge's first (lowest-index) side, -1 beside the second.
    ``M[:, e]`` has +1 on the two corners beside the first side of ``e``.
    """

    interior: list[int]
    W: np.ndarray
    M: np.ndarray
    position: dict[int, int] = field(default_factory=dict)

    def w(self, e: int) -> np.ndarray:
        return self.W[:, self.position[e]]

    def m(self, e: int) -> np.ndarray:
        return self.M[:, e]

    def deform(self, x, coeffs) -> np.ndarray:
        return np.asarray(x, dtype=float) + self.W @ np.asarray(coeffs, dtype=float)


def conformal_basis(td: TriangularDecomposition, *, verify: bool = True, tol: float = 1e-12) -> ConformalBasis:
    n = 3 * td.F
    interior = td.interior_edges
    W = np.zeros((n, len(interior)))
    for k, e in enumerate(interior):
        first, second = td.edges[e].sides
        for sign, side in ((1.0, first), (-1.0, second)):
            _, b, c = _side_corners(side)
            W[b, k] += sign
            W[c, k] += sign
    M = np.zeros((n, td.E))
    for e in range(td.E):
        _, b, c = _side_corners(td.edges[e].sides[0])
        M[b, e] += 1.0
        M[c, e] += 1.0
    basis = ConformalBasis(interior, W, M, {e: k for k, e in enumerate(interior)})
    if verify:
        verify_basis(td, basis, tol)
    return basis


def theta_half_matrix(td: TriangularDecomposition) -> np.ndarray:
    """Linear part of the per-side angles ``pi/2 - psi_t^e`` (``3F x 3F``)."""
    n = 3 * td.F
    out = np.zeros((n, n))
    for s in range(n):
        opp, b, c = _side_corners(s)
        out[s, opp] = 0.5
        out[s, b] = -0.5
        out[s, c] = -0.5
    return out


def verify_basis(td: TriangularDecomposition, basis: ConformalBasis, tol: float = 1e-12) -> None:
    """Check the pairing identities; raise :class:`BasisVerificationFailed` on mismatch."""
    P = psi_matrix(td)
    Vm = vertex_matrix(td)
    W, M = basis.W, basis.M
    if W.size:
        if np.abs(Vm @ W).max() > tol:
            raise BasisVerificationFailed("vertex sums change along some w_e")
        if np.abs(P @ W).max() > tol:
            raise BasisVerificationFailed("some psi^f is not invariant under w_e")
        # per-side angle pairing: +-1 on the sides of e, 0 elsewhere
        TH = theta_half_matrix(td) @ W
        expected = np.zeros_like(TH)
        for k, e in enumerate(basis.interior):
            first, second = td.edges[e].sides
            expected[first, k] -= 1.0
            expected[second, k] += 1.0
        if np.abs(TH - expected).max() > tol:
            raise BasisVerificationFailed("theta_t^e(w_f) differs from +-delta")
        if np.linalg.matrix_rank(W) != len(basis.interior):
            raise BasisVerificationFailed("w_e are linearly dependent")
    if td.E and np.abs(P @ M - np.eye(td.E)).max() > tol:
        raise BasisVerificationFailed("Psi(m_e) is not the unit vector at e")


# ---------------------------------------------------------------------------
# membership


@dataclass
class MembershipReport:
    in_V: bool
    in_N: bool
    in_D: bool
    curvature: np.ndarray
    vertex_defect: np.ndarray
    range_violations: list[int]
    on_boundary: bool
    legal_triangles: list[int]
    excluded_triangles: list[int]
    in_bad_set: bool

    @property
    def location(self) -> str:
        if self.in_N:
            return "interior"
        if self.in_bad_set:
            return "bad"
        if self.on_boundary:
            return "boundary"
        return "outside"


def admissible(td: TriangularDecomposition, targets=None) -> bool:
    """Whether angle systems can exist at all: sum of targets below ``pi * F``."""
    t = td.vertex_targets if targets is None else td.with_targets(targets).vertex_targets
    return bool(np.sum(t) < PI * td.F)


def classify(
    td: TriangularDecomposition,
    x,
    targets=None,
    *,
    margin: float = 0.0,
    zero_tol: float = 1e-12,
) -> MembershipReport:
    """Locate ``x`` relative to the flat, the open angle-system set and the Delaunay set.

    Boundary classification uses ``zero_tol`` to decide that an angle or a
    curvature sits exactly at zero (and an angle at ``pi``).
    """
    x = as_angles(td, x)
    goal = td.vertex_targets if targets is None else td.with_targets(targets).vertex_targets
    defect = vertex_sums(td, x) - goal
    in_V = bool(np.all(np.abs(defect) <= V_TOL))
    k = curvatures(x)
    violations = [int(c) for c in np.flatnonzero((x <= margin) | (x >= PI - margin))]
    strict = in_V and not violations and bool(np.all(k < -margin))
    in_D = False
    if strict:
        theta = theta_edges(td, x)
        upper = np.where(boundary_mask(td), HALF_PI, PI)
        in_D = bool(np.all(theta > margin) and np.all(theta < upper - margin))

    closure = (
        in_V
        and bool(np.all(x >= -zero_tol))
        and bool(np.all(x <= PI + zero_tol))
        and bool(np.all(k <= zero_tol))
    )
    on_boundary = closure and not strict
    legal, excluded = [], []
    if on_boundary:
        for t in range(td.F):
            d = x[3 * t : 3 * t + 3]
            zeros = np.abs(d) <= zero_tol
            if zeros.sum() == 2 and abs(d[~zeros][0] - PI) <= zero_tol:
                excluded.append(t)
            elif zeros.any() or abs(k[t]) <= zero_tol:
                legal.append(t)
    return MembershipReport(
        in_V=in_V,
        in_N=strict,
        in_D=in_D,
        curvature=k,
        vertex_defect=defect,
        range_violations=violations,
        on_boundary=on_boundary,
        legal_triangles=legal,
        excluded_triangles=excluded,
        in_bad_set=on_boundary and not legal,
    )


def equal_split_angles(td: TriangularDecomposition, targets=None) -> np.ndarray:
    """Give every corner at ``v`` the share ``target_v / degree(v)``.

    A convenient starting angle system; it lies in the flat by construction
    but may fail the curvature or range conditions on irregular meshes.
    """
    goal = td.vertex_targets if targets is None else td.with_targets(targets).vertex_targets
    x = np.zeros(3 * td.F)
    for f in td.flowers:
        share = goal[f.vertex] / len(f.corners)
        for c in f.corners:
            x[c] = share
    return x
