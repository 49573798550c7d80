"""Uniform hyperbolic structures on triangulated surfaces by prism-volume maximization."""

from .angles import ConformalBasis, classify, conformal_basis, equal_split_angles
from .complex import TriangularDecomposition, build_decomposition, validate
from .errors import IdealDiskError
from .hypvol import lobachevsky, prism_gradient, prism_volume
from .patterns import PatternVector, check_n1, check_n2_brute, check_n2_flow, realize_pattern
from .uniformize import SolverConfig, UniformStructure, maximize

__version__ = "0.1.0"

__all__ = [
    "ConformalBasis",
    "IdealDiskError",
    "PatternVector",
    "SolverConfig",
    "TriangularDecomposition",
    "UniformStructure",
    "build_decomposition",
    "check_n1",
    "check_n2_brute",
    "check_n2_flow",
    "classify",
    "conformal_basis",
    "equal_split_angles",
    "lobachevsky",
    "maximize",
    "prism_gradient",
    "prism_volume",
    "realize_pattern",
    "validate",
]
