"""Concave volume maximization over a conformal class.

The objective is the total prism volume ``H(y) = sum_t V(d^t(y))``.  Its
critical point in the class ``(x0 + C) & N`` is the unique angle system whose
triangles have matching edge lengths.  We optimize over the coefficients of
the deformation vectors ``w_e``, so every iterate stays in the class exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import angles as ang
from .complex import TriangularDecomposition
from .errors import MaxIterExceeded, NotInN, SolverStalled
from .hypvol import prism_gradient, prism_hessian, prism_volume_tetra, truncated_lengths

log = logging.getLogger(__name__)

PI = math.pi


@dataclass
class SolverConfig:
    tol_residual: float = 1e-10
    max_iter: int = 1000
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    margin: float = 0.0
    hessian_mode: str = "newton"  # "newton", "bfgs" or "gradient"
    min_step: float = 1e-20

    def __post_init__(self):
        if not (0 < self.tol_residual < 1e-2):
            raise ValueError("tol_residual must lie in (0, 1e-2)")
        if self.max_iter <= 0 or not (0 < self.armijo_c1 < 1) or not (0 < self.backtrack < 1):
            raise ValueError("solver constants must be positive (c1, backtrack below 1)")
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")
        if self.hessian_mode not in ("newton", "bfgs", "gradient"):
            raise ValueError(f"unknown hessian_mode {self.hessian_mode!r}")


@dataclass
class UniformStructure:
    angles: np.ndarray
    lengths: np.ndarray  # (F, 3): length of side i of triangle t
    residual: float
    gradient_residual: float
    objective: float
    iterations: int
    conformal_coords: np.ndarray
    interior_edges: list[int]
    history: list[float] = field(default_factory=list, repr=False)


# ---------------------------------------------------------------------------
# per-triangle quantities


def _triples(x):
    a = np.asarray(x, dtype=float).reshape(-1, 3)
    return a[:, 0], a[:, 1], a[:, 2]


def side_lengths(x) -> np.ndarray:
    """``(F, 3)`` array: length of side ``i`` (opposite corner ``i``) in each triangle."""
    a, b, c = truncated_lengths(*_triples(x))
    trunc = np.stack([a, b, c], axis=1)
    # l = 2 asinh(exp(l*/2))
    return 2.0 * np.arcsinh(np.exp(0.5 * trunc))


def truncated_side_lengths(x) -> np.ndarray:
    a, b, c = truncated_lengths(*_triples(x))
    return np.stack([a, b, c], axis=1)


def length_residual(td: TriangularDecomposition, x) -> float:
    L = side_lengths(x).ravel()
    worst = 0.0
    for e in td.interior_edges:
        s1, s2 = td.edges[e].sides
        worst = max(worst, abs(L[s1] - L[s2]))
    return worst


def _require_N(td, x, margin=0.0):
    rep = ang.classify(td, x, margin=margin)
    if not rep.in_N:
        raise NotInN(
            "angle vector is not a strict angle system",
            in_V=rep.in_V,
            range_violations=rep.range_violations[:10],
            max_curvature=float(rep.curvature.max()) if rep.curvature.size else None,
        )
    return rep


def _in_N_fast(x, margin) -> bool:
    # vertex sums are preserved along the class, so only ranges and curvature matter
    if np.any(x <= margin) or np.any(x >= PI - margin):
        return False
    return bool(np.all(ang.curvatures(x) < -margin))


# ---------------------------------------------------------------------------
# objective and derivatives


def objective(td: TriangularDecomposition, x, *, check: bool = True) -> float:
    """Total prism volume, summed in triangle order."""
    x = ang.as_angles(td, x)
    if check:
        _require_N(td, x)
    vols = prism_volume_tetra(*_triples(x))
    return float(math.fsum(np.atleast_1d(vols)))


def angle_gradient(x) -> np.ndarray:
    """Gradient of the objective with respect to all ``3F`` corner angles."""
    return prism_gradient(*_triples(x), check=False).ravel()


def gradient(td: TriangularDecomposition, x, *, check: bool = True) -> np.ndarray:
    """Derivative of the objective along each ``w_e`` (interior edge order).

    ``g_e = 2 ln sinh(l_plus / 2) - 2 ln sinh(l_minus / 2)`` where ``l_plus``
    is the length of ``e`` in the triangle on the +1 side of ``w_e`` (its
    first side) and ``l_minus`` on the -1 side.  So ``g_e < 0`` exactly when
    the -1 side sees the longer edge.
    """
    x = ang.as_angles(td, x)
    if check:
        _require_N(td, x)
    T = truncated_side_lengths(x).ravel()
    return np.array([T[td.edges[e].sides[0]] - T[td.edges[e].sides[1]] for e in td.interior_edges])


def gradient_from_prisms(td: TriangularDecomposition, x, basis=None) -> np.ndarray:
    """Same quantity assembled as ``W^T grad_x H`` from the per-prism gradients."""
    basis = basis or ang.conformal_basis(td)
    return basis.W.T @ angle_gradient(ang.as_angles(td, x))


def angle_hessian_blocks(x) -> np.ndarray:
    return prism_hessian(*_triples(x), check=False)


def coordinate_hessian(td: TriangularDecomposition, x, basis) -> np.ndarray:
    blocks = angle_hessian_blocks(x)
    n = 3 * td.F
    Hx = np.zeros((n, n))
    for t in range(td.F):
        Hx[3 * t : 3 * t + 3, 3 * t : 3 * t + 3] = blocks[t]
    return basis.W.T @ Hx @ basis.W


# ---------------------------------------------------------------------------
# the ascent


def _diagnostics(x) -> dict:
    a = np.asarray(x).reshape(-1, 3)
    return {
        "smallest_angle_per_triangle": a.min(axis=1).tolist(),
        "largest_curvature": float((a.sum(axis=1) - PI).max()),
        "near_excluded_shape": [
            t for t, d in enumerate(a) if np.sort(d)[1] < 1e-3 and abs(d.max() - PI) < 1e-3
        ],
    }


def maximize(
    td: TriangularDecomposition,
    x0,
    cfg: SolverConfig | None = None,
    *,
    basis=None,
) -> UniformStructure:
    """Ascend the prism-volume objective from ``x0`` to the uniform angle system.

    Newton steps use the analytic Hessian (negative definite on the class);
    ``bfgs`` and ``gradient`` modes are available for comparison.  Each step
    is first halved until the trial point is a strict angle system, then
    backtracked until the Armijo condition holds.  Once objective changes
    drop to rounding level the test switches to a decrease of the gradient
    norm.
    """
    cfg = cfg or SolverConfig()
    x0 = ang.as_angles(td, x0).copy()
    _require_N(td, x0, cfg.margin)
    basis = basis or ang.conformal_basis(td)
    W = basis.W
    n = W.shape[1]

    coords = np.zeros(n)
    x = x0.copy()
    H = objective(td, x, check=False)
    history = [H]
    inv_hess = np.eye(n)
    g = gradient(td, x, check=False)
    it = 0
    residual = length_residual(td, x)
    while residual > cfg.tol_residual:
        if it >= cfg.max_iter:
            raise MaxIterExceeded(
                f"no convergence after {it} iterations (residual {residual:.3e})",
                residual=residual,
                **_diagnostics(x),
            )
        if cfg.hessian_mode == "newton":
            hess = coordinate_hessian(td, x, basis)
            try:
                direction = np.linalg.solve(-hess, g)
            except np.linalg.LinAlgError:
                direction = g.copy()
            if not np.isfinite(direction).all() or direction @ g <= 0:
                direction = g.copy()
        elif cfg.hessian_mode == "bfgs":
            direction = inv_hess @ g
            if direction @ g <= 0:
                inv_hess = np.eye(n)
                direction = g.copy()
        else:
            direction = g.copy()

        slope = float(direction @ g)
        step = 1.0
        while not _in_N_fast(x + step * (W @ direction), cfg.margin):
            step *= 0.5
            if step < cfg.min_step:
                raise SolverStalled("cannot stay inside the angle-system set", **_diagnostics(x))
        # objective values are sums of O(F) terms; below this the difference is rounding
        noise = 64 * np.finfo(float).eps * max(1.0, abs(H)) * max(1, td.F)
        while True:
            trial_coords = coords + step * direction
            trial = x0 + W @ trial_coords
            H_trial = objective(td, trial, check=False)
            if abs(H_trial - H) <= noise:
                # values no longer resolve progress; gradients still do
                g_new = gradient(td, trial, check=False)
                if np.linalg.norm(g_new) < np.linalg.norm(g):
                    break
            elif H_trial >= H + cfg.armijo_c1 * step * slope:
                g_new = gradient(td, trial, check=False)
                break
            step *= cfg.backtrack
            if step < cfg.min_step:
                raise SolverStalled(
                    f"line search failed at residual {residual:.3e}",
                    residual=residual,
                    **_diagnostics(x),
                )
        if cfg.hessian_mode == "bfgs":
            # ascent on H is descent on -H: s = step, y = -(g_new - g)
            s_vec = trial_coords - coords
            y_vec = g - g_new
            sy = float(s_vec @ y_vec)
            if sy > 1e-300:
                rho = 1.0 / sy
                I = np.eye(n)
                inv_hess = (I - rho * np.outer(s_vec, y_vec)) @ inv_hess @ (
                    I - rho * np.outer(y_vec, s_vec)
                ) + rho * np.outer(s_vec, s_vec)
        coords, x, H, g = trial_coords, trial, H_trial, g_new
        history.append(H)
        it += 1
        residual = length_residual(td, x)
        log.debug("iter %d: H=%.15g residual=%.3e step=%.3g", it, H, residual, step)

    return UniformStructure(
        angles=x,
        lengths=side_lengths(x),
        residual=residual,
        gradient_residual=float(np.abs(g).max()) if g.size else 0.0,
        objective=H,
        iterations=it,
        conformal_coords=coords,
        interior_edges=list(basis.interior),
        history=history,
    )
