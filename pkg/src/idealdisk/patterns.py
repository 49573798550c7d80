"""Edge patterns: the pattern map, its linear feasibility conditions, realization.

A pattern assigns to every edge an intersection angle ``theta``; the
equivalent ``psi`` value is ``pi - theta`` on interior edges and
``pi/2 - theta`` on boundary edges.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from . import angles as ang
from .complex import TriangularDecomposition
from .errors import InfeasiblePattern, NegativeTheta, Phase2Failure, TooLarge, WrongLength
from .uniformize import SolverConfig, UniformStructure, maximize

PI = math.pi
N1_TOL = 1e-9
N2_BAND = 1e-9
BRUTE_MAX_F = 24


@dataclass
class PatternVector:
    theta: np.ndarray
    psi: np.ndarray

    @classmethod
    def from_theta(cls, td: TriangularDecomposition, theta) -> "PatternVector":
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (td.E,):
            raise WrongLength(f"expected {td.E} edge values, got shape {theta.shape}")
        return cls(theta.copy(), ang.psi_from_theta(td, theta))

    @classmethod
    def from_psi(cls, td: TriangularDecomposition, psi) -> "PatternVector":
        psi = np.asarray(psi, dtype=float)
        if psi.shape != (td.E,):
            raise WrongLength(f"expected {td.E} edge values, got shape {psi.shape}")
        return cls(ang.theta_from_psi(td, psi), psi.copy())


def _as_pattern(td, p) -> PatternVector:
    return p if isinstance(p, PatternVector) else PatternVector.from_theta(td, p)


@dataclass
class FeasibilityCertificate:
    condition: str  # "n1", "n2" or "window"
    satisfied: bool
    vertex: int | None = None
    vertex_sum: float | None = None
    target: float | None = None
    subset: tuple[int, ...] | None = None
    slack: float | None = None
    sums: list[float] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "satisfied" if self.satisfied else "violated"

    def to_dict(self) -> dict:
        out = {"condition": self.condition, "verdict": self.verdict}
        for key in ("vertex", "vertex_sum", "target", "slack"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.subset is not None:
            out["subset"] = list(self.subset)
        return out


def pattern_of(td: TriangularDecomposition, x) -> PatternVector:
    """Image of an angle vector under the pattern map."""
    return PatternVector.from_psi(td, ang.psi_edges(td, x))


def in_window(td: TriangularDecomposition, p) -> np.ndarray:
    """Per-edge membership of the open Delaunay window."""
    p = _as_pattern(td, p)
    upper = np.where(ang.boundary_mask(td), 0.5 * PI, PI)
    return (p.theta > 0) & (p.theta < upper)


def check_n1(td: TriangularDecomposition, p, targets=None) -> FeasibilityCertificate:
    """Vertex condition: psi summed over the edge incidences at ``v`` equals its target."""
    p = _as_pattern(td, p)
    goal = td.vertex_targets if targets is None else td.with_targets(targets).vertex_targets
    sums = [float(math.fsum(p.psi[e] for e in f.edges)) for f in td.flowers]
    for v, s in enumerate(sums):
        if abs(s - goal[v]) > N1_TOL:
            return FeasibilityCertificate(
                "n1", False, vertex=v, vertex_sum=s, target=float(goal[v]), sums=sums
            )
    return FeasibilityCertificate("n1", True, sums=sums)


def subset_slack(td: TriangularDecomposition, p, subset) -> float:
    """``sum_{e in S} theta^e - pi |S|`` with each edge of ``S`` counted once."""
    p = _as_pattern(td, p)
    edges = sorted({e for t in subset for e in td.triangle_edges(t)})
    return float(math.fsum(p.theta[e] for e in edges) - PI * len(subset))


def check_n2_brute(td: TriangularDecomposition, p, *, band: float = N2_BAND) -> FeasibilityCertificate:
    """Enumerate every nonempty triangle subset; report the most violating one.

    Violated when some subset has slack at most ``band``.
    """
    if td.F > BRUTE_MAX_F:
        raise TooLarge(f"{td.F} triangles exceeds the enumeration limit {BRUTE_MAX_F}")
    p = _as_pattern(td, p)
    best, best_set = math.inf, None
    for r in range(1, td.F + 1):
        for S in itertools.combinations(range(td.F), r):
            s = subset_slack(td, p, S)
            if s < best:
                best, best_set = s, S
    if best_set is None:
        return FeasibilityCertificate("n2", True)
    return FeasibilityCertificate("n2", best > band, subset=best_set, slack=best)


def _closure_network(td: TriangularDecomposition, theta, forced=None) -> nx.DiGraph:
    G = nx.DiGraph()
    for t in range(td.F):
        if t == forced:
            G.add_edge("s", ("t", t))  # no capacity attribute: infinite
        else:
            G.add_edge("s", ("t", t), capacity=PI)
        for e in set(td.triangle_edges(t)):
            G.add_edge(("t", t), ("e", e))
    for e in range(td.E):
        G.add_edge(("e", e), "k", capacity=float(theta[e]))
    return G


def _min_closure(td, theta, forced=None) -> tuple[tuple[int, ...], float]:
    """Triangle set minimizing the slack, optionally forced to contain one triangle."""
    G = _closure_network(td, theta, forced)
    R = nx.algorithms.flow.preflow_push(G, "s", "k")
    # nx.minimum_cut tests saturation with ==, which float capacities defeat;
    # take the source side of the residual graph with a tolerance instead
    tol = 1e-12 * max(1.0, R.graph["flow_value"])
    source_side, stack = {"s"}, ["s"]
    while stack:
        u = stack.pop()
        for v, d in R[u].items():
            if v not in source_side and d["capacity"] - d["flow"] > tol:
                source_side.add(v)
                stack.append(v)
    S = tuple(sorted(node[1] for node in source_side if isinstance(node, tuple) and node[0] == "t"))
    return S, (subset_slack(td, PatternVector.from_theta(td, theta), S) if S else 0.0)


def check_n2_flow(td: TriangularDecomposition, p, *, band: float = N2_BAND) -> FeasibilityCertificate:
    """Decide the subset condition by minimum cuts instead of enumeration.

    Network: source -> triangle (capacity pi), triangle -> each of its edges
    (infinite), edge -> sink (capacity theta).  Source-side triangles of a
    minimum cut minimize ``sum theta - pi |S|`` over all subsets, the empty
    one included.  A negative optimum is a violation outright; otherwise the
    minimum over nonempty subsets is found by forcing each triangle into the
    source side in turn, and compared with ``band``.
    """
    p = _as_pattern(td, p)
    if np.any(p.theta < 0):
        raise NegativeTheta("the cut reduction needs nonnegative intersection angles")
    if td.F == 0:
        return FeasibilityCertificate("n2", True)
    S, slack = _min_closure(td, p.theta)
    if S and slack < -band:
        return FeasibilityCertificate("n2", False, subset=S, slack=slack)
    best, best_set = math.inf, None
    for t in range(td.F):
        S, slack = _min_closure(td, p.theta, forced=t)
        if slack < best:
            best, best_set = slack, S
    return FeasibilityCertificate("n2", best > band, subset=best_set, slack=best)


# ---------------------------------------------------------------------------
# realization


def preimage(td: TriangularDecomposition, p) -> np.ndarray:
    """Least-norm angle vector with the given pattern (the pattern map has full rank)."""
    p = _as_pattern(td, p)
    P = ang.psi_matrix(td)
    x, *_ = np.linalg.lstsq(P, p.psi, rcond=None)
    return x


def _slack_system(td: TriangularDecomposition, x, W):
    """Affine slacks ``G c + h`` of the strict angle-system inequalities."""
    n3 = 3 * td.F
    S = np.zeros((td.F, n3))
    for t in range(td.F):
        S[t, 3 * t : 3 * t + 3] = 1.0
    G = np.vstack([W, -W, -S @ W])
    h = np.concatenate([x, PI - x, PI - S @ x])
    return G, h


def find_interior_point(
    td: TriangularDecomposition,
    x,
    *,
    basis=None,
    temperatures=(1e-1, 1e-2, 1e-3, 1e-4),
) -> tuple[np.ndarray, float]:
    """Maximize the smallest slack of the class through ``x`` by smoothed-min ascent.

    Returns the best point found and its hard minimum slack (positive when it
    is a strict angle system).
    """
    basis = basis or ang.conformal_basis(td)
    W = basis.W
    G, h = _slack_system(td, x, W)
    c = np.zeros(W.shape[1])

    def hard(cc):
        return float((G @ cc + h).min())

    best_c, best = c.copy(), hard(c)
    if W.shape[1] == 0:
        return np.asarray(x, dtype=float).copy(), best
    for tau in temperatures:

        def neg_softmin(cc, tau=tau):
            s = G @ cc + h
            z = -s / tau
            lse = logsumexp(z)
            w = np.exp(z - lse)
            return tau * lse, -(G.T @ w)

        res = minimize(neg_softmin, c, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
        c = res.x
        val = hard(c)
        if val > best:
            best_c, best = c.copy(), val
    return basis.deform(x, best_c), best


def realize_pattern(
    td: TriangularDecomposition,
    p,
    targets=None,
    cfg: SolverConfig | None = None,
) -> UniformStructure:
    """Find the uniform angle system whose pattern is ``p``.

    Checks the window and both linear conditions, solves for some preimage,
    moves it into the strict angle-system set within its class, then runs the
    volume ascent.
    """
    if targets is not None:
        td = td.with_targets(targets)
    p = _as_pattern(td, p)
    inside = in_window(td, p)
    if not inside.all():
        bad = int(np.flatnonzero(~inside)[0])
        raise InfeasiblePattern(
            f"theta on edge {bad} is outside the Delaunay window",
            FeasibilityCertificate("window", False, slack=float(p.theta[bad])),
            edge=bad,
        )
    cert = check_n1(td, p)
    if not cert.satisfied:
        raise InfeasiblePattern(f"vertex condition fails at vertex {cert.vertex}", cert)
    cert = check_n2_flow(td, p)
    if not cert.satisfied:
        raise InfeasiblePattern(f"subset condition fails for triangles {list(cert.subset)}", cert)

    basis = ang.conformal_basis(td)
    x = preimage(td, p)
    start, slack = find_interior_point(td, x, basis=basis)
    if not (slack > 0 and ang.classify(td, start).in_N):
        raise Phase2Failure(
            f"no strict angle system found in the class (best minimum slack {slack:.3e})",
            best_slack=slack,
        )
    return maximize(td, start, cfg, basis=basis)
