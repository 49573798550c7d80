"""Volumes of ideal prisms over hyperbolic triangles.

The prism over a triangle with angles ``(A, B, C)`` is the convex hull of the
triangle and the full geodesics perpendicular to its plane through its three
vertices: an ideal polyhedron with six ideal vertices, vertical dihedral
angles ``A, B, C`` and top/bottom dihedral angles ``A*, B*, C*`` where
``A* = (pi + A - B - C) / 2``.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import zeta

from .errors import CrossCheckFailure, DomainError

PI = math.pi

# zeta(2n) / (n (2n+1) (2 pi)^(2n)); with |x| <= pi the ratio of
# consecutive terms is at most 1/4, so 30 terms reach ~1e-19.
_N_TERMS = 30
_n = np.arange(1, _N_TERMS + 1)
_CLAUSEN_COEF = zeta(2 * _n) / (_n * (2 * _n + 1) * (2 * PI) ** (2 * _n))
_CLAUSEN_POW = 2 * _n + 1


def lobachevsky(theta):
    """Lobachevsky function ``-int_0^theta ln|2 sin t| dt``.

    Reduces to ``[-pi/2, pi/2]`` by oddness and pi-periodicity, then uses
    ``Cl2(x) = x - x ln x + sum zeta(2n) x^(2n+1) / (n (2n+1) (2pi)^(2n))``
    at ``x = 2|theta|``.
    """
    theta = np.asarray(theta, dtype=float)
    r = theta - PI * np.round(theta / PI)
    x = 2.0 * np.abs(r)
    safe = np.where(x > 0, x, 1.0)
    series = np.sum(_CLAUSEN_COEF * safe[..., None] ** _CLAUSEN_POW, axis=-1)
    cl2 = np.where(x > 0, x - x * np.log(safe) + series, 0.0)
    out = 0.5 * np.sign(r) * cl2
    return out if out.ndim else float(out)


def ideal_tet_volume(alpha, beta):
    """Volume of the ideal tetrahedron with dihedral angles ``alpha, beta, pi - alpha - beta``.

    Defined on the closed triangle ``alpha, beta >= 0, alpha + beta <= pi``
    where it vanishes on the boundary.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = PI - alpha - beta
    tol = 1e-14
    if np.any(alpha < -tol) or np.any(beta < -tol) or np.any(gamma < -tol):
        raise DomainError("ideal tetrahedron angles must be nonnegative with sum pi")
    out = lobachevsky(alpha) + lobachevsky(beta) + lobachevsky(gamma)
    return out if np.ndim(out) else float(out)


def _angles(A, B, C):
    return (np.asarray(A, dtype=float), np.asarray(B, dtype=float), np.asarray(C, dtype=float))


def check_domain(A, B, C, *, closed: bool = False) -> None:
    A, B, C = _angles(A, B, C)
    if closed:
        tol = 1e-14
        bad = (A < -tol) | (B < -tol) | (C < -tol) | (A + B + C > PI + tol)
    else:
        bad = (A <= 0) | (B <= 0) | (C <= 0) | (A + B + C >= PI)
    if np.any(bad) or not (np.all(np.isfinite(A)) and np.all(np.isfinite(B)) and np.all(np.isfinite(C))):
        raise DomainError("angles must lie in (0, pi) with A + B + C < pi")


def star_angles(A, B, C):
    """Top-edge dihedral angles ``(A*, B*, C*)`` of the prism."""
    A, B, C = _angles(A, B, C)
    half_defect = 0.5 * (PI - A - B - C)
    return A + half_defect, B + half_defect, C + half_defect


@dataclass(frozen=True)
class TetraDecomposition:
    """Three ideal tetrahedra ``(alpha_i, beta_i, gamma_i)`` whose volumes sum to the prism's.

    With top vertices ``1', 2', 3'`` and bottom ``1'', 2'', 3''`` the pieces are
    ``(1' 2' 3' 1'')``, ``(2' 3' 1'' 2'')`` and ``(3' 1'' 2'' 3'')``.
    """

    tetrahedra: tuple[tuple[float, float, float], ...]

    @property
    def volume(self) -> float:
        return float(sum(ideal_tet_volume(a, b) for a, b, _ in self.tetrahedra))


def tetra_decomposition(A: float, B: float, C: float) -> TetraDecomposition:
    """Affine dihedral angles of the three-tetrahedron split of the prism."""
    As, Bs, Cs = star_angles(A, B, C)
    half_defect = 0.5 * (PI - A - B - C)
    t1 = (A, Bs, Cs)
    t2 = (B, half_defect, PI - B - half_defect)
    t3 = (C, As, Bs)
    return TetraDecomposition(tuple(tuple(float(v) for v in t) for t in (t1, t2, t3)))


def prism_volume_tetra(A, B, C):
    """Prism volume as the sum of the three tetrahedra, vectorized.

    ``V = L(A) + L(B) + L(C) + L(A*) + L(B*) + L(C*) + L((pi - A - B - C)/2)``
    after cancelling ``L(pi - x) = -L(x)`` between the pieces.
    """
    A, B, C = _angles(A, B, C)
    As, Bs, Cs = star_angles(A, B, C)
    L = lobachevsky
    out = L(A) + L(B) + L(C) + L(As) + L(Bs) + L(Cs) + L(0.5 * (PI - A - B - C))
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# lengths


def _cosh_minus_one(A, B, C):
    """``cosh(a) - 1`` for the side opposite ``A`` (hyperbolic law of cosines)."""
    return (np.cos(A) + np.cos(B + C)) / (np.sin(B) * np.sin(C))


_ROTATE = {"a": (0, 1, 2), "b": (1, 2, 0), "c": (2, 0, 1)}


def _rotated(A, B, C, which):
    try:
        idx = _ROTATE[which]
    except KeyError:
        raise ValueError(f"edge label must be 'a', 'b' or 'c', not {which!r}") from None
    angles = _angles(A, B, C)
    return tuple(angles[i] for i in idx)


def edge_length(A, B, C, which: str = "a"):
    """Length of the side opposite ``A`` (``'a'``), ``B`` (``'b'``) or ``C`` (``'c'``)."""
    check_domain(A, B, C)
    P, Q, R = _rotated(A, B, C, which)
    out = 2.0 * np.arcsinh(np.sqrt(0.5 * _cosh_minus_one(P, Q, R)))
    return out if np.ndim(out) else float(out)


def _truncated(A, B, C):
    # 2 ln sinh(a/2) = ln((cosh a - 1) / 2)
    return np.log(np.cos(A) + np.cos(B + C)) - np.log(2.0 * np.sin(B) * np.sin(C))


def truncated_length(A, B, C, which: str = "a"):
    """Horosphere-truncated length ``2 ln sinh(l/2)`` of the chosen side."""
    check_domain(A, B, C)
    out = _truncated(*_rotated(A, B, C, which))
    return out if np.ndim(out) else float(out)


def truncated_lengths(A, B, C):
    """``(a*, b*, c*)`` without domain checks, for hot loops."""
    A, B, C = _angles(A, B, C)
    return _truncated(A, B, C), _truncated(B, C, A), _truncated(C, A, B)


# ---------------------------------------------------------------------------
# derivatives


def prism_gradient(A, B, C, *, check: bool = True):
    """``(dV/dA, dV/dB, dV/dC) = ((-a* + b* + c*)/2, ...)``."""
    if check:
        check_domain(A, B, C)
    a, b, c = truncated_lengths(A, B, C)
    return np.stack([0.5 * (-a + b + c), 0.5 * (a - b + c), 0.5 * (a + b - c)], axis=-1)


def _truncated_derivatives(A, B, C):
    """Gradient of ``a*`` with respect to ``(A, B, C)``."""
    den = np.cos(A) + np.cos(B + C)
    s = np.sin(B + C)
    dA = -np.sin(A) / den
    dB = -s / den - np.cos(B) / np.sin(B)
    dC = -s / den - np.cos(C) / np.sin(C)
    return dA, dB, dC


def prism_hessian(A, B, C, *, check: bool = True):
    """Analytic Hessian of the prism volume, shape ``(..., 3, 3)``."""
    if check:
        check_domain(A, B, C)
    A, B, C = _angles(A, B, C)
    # rows: d(a*), d(b*), d(c*) w.r.t. (A, B, C)
    da = _truncated_derivatives(A, B, C)
    db_rot = _truncated_derivatives(B, C, A)  # w.r.t. (B, C, A)
    dc_rot = _truncated_derivatives(C, A, B)  # w.r.t. (C, A, B)
    da = np.stack(da, axis=-1)
    db = np.stack((db_rot[2], db_rot[0], db_rot[1]), axis=-1)
    dc = np.stack((dc_rot[1], dc_rot[2], dc_rot[0]), axis=-1)
    return 0.5 * np.stack([-da + db + dc, da - db + dc, da + db - dc], axis=-2)


# ---------------------------------------------------------------------------
# independent route: integrate the Schlafli differential


def _directional(point, direction):
    g = prism_gradient(*point, check=False)
    return float(np.dot(g, direction))


def _segment_integral(p, q, tol):
    p = np.asarray(p, dtype=float)
    d = np.asarray(q, dtype=float) - p
    val, _ = quad(lambda s: _directional(p + s * d, d), 0.0, 1.0, epsabs=tol, epsrel=tol, limit=400)
    return val


def prism_volume_schlafli(A: float, B: float, C: float, via=None, *, tol: float = 1e-13) -> float:
    """Prism volume by integrating ``dV = -a* dA* - b* dB* - c* dC*``.

    The path starts at the all-zero corner, where the triangle is ideal and
    the prism collapses onto it (volume zero); ``via`` adds intermediate
    points to make a piecewise-linear path.  Every point must stay inside the
    open domain except the origin.
    """
    check_domain(A, B, C)
    points = [np.zeros(3)]
    for p in via or ():
        check_domain(*p)
        points.append(np.asarray(p, dtype=float))
    points.append(np.array([A, B, C], dtype=float))
    return float(sum(_segment_integral(p, q, tol) for p, q in zip(points[:-1], points[1:])))


def prism_volume(A, B, C, *, cross_check: bool = False, cross_tol: float = 1e-8):
    """Prism volume from the tetrahedral decomposition.

    Accepts the closed domain (angles may reach 0, the sum may reach pi).
    With ``cross_check`` a scalar input is also integrated along the Schlafli
    differential and :class:`CrossCheckFailure` is raised if the two routes
    differ by more than ``cross_tol``.
    """
    check_domain(A, B, C, closed=True)
    value = prism_volume_tetra(A, B, C)
    if cross_check:
        if np.ndim(value):
            raise ValueError("cross_check supports scalar input only")
        other = prism_volume_schlafli(A, B, C)
        if abs(value - other) > cross_tol:
            raise CrossCheckFailure(
                f"tetrahedral volume {value!r} vs Schlafli integral {other!r}",
                tetra=value,
                schlafli=other,
            )
    return value
