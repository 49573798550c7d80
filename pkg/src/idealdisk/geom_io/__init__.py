"""Development into the Poincare disk, JSON and SVG output, command line."""

from .layout import (
    DevelopedLayout,
    EdgeCheck,
    FlowerDevelopment,
    circle_intersection_angle,
    circumcircle,
    develop,
    develop_flower,
    hyp_distance,
    placed_side_lengths,
    verify_pattern,
)
from .jsonio import MeshDocument, PatternDocument, SolutionDocument
from .svg import RenderOptions, geodesic_path, render_svg

__all__ = [
    "DevelopedLayout",
    "EdgeCheck",
    "FlowerDevelopment",
    "MeshDocument",
    "PatternDocument",
    "RenderOptions",
    "SolutionDocument",
    "circle_intersection_angle",
    "circumcircle",
    "develop",
    "develop_flower",
    "geodesic_path",
    "hyp_distance",
    "placed_side_lengths",
    "render_svg",
    "verify_pattern",
]
