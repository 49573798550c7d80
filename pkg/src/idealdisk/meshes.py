"""Small ready-made decompositions used by the CLI, tests and docs."""

from __future__ import annotations

from .complex import TriangularDecomposition, build_decomposition


def genus2_octagon(vertex_targets=None) -> TriangularDecomposition:
    """Closed genus-2 surface with one vertex, 9 edges and 6 triangles.

    Fan triangulation of the octagon ``P0..P7`` with side word
    ``a b a^-1 b^-1 c d c^-1 d^-1``; triangle ``k`` has corners
    ``(P0, P_{k+1}, P_{k+2})``.
    """
    # octagon side j lives on: j=0 -> (0, 2); 1..6 -> (j-1, 0); 7 -> (5, 1)
    def octagon_side(j):
        if j == 0:
            return (0, 2)
        if j == 7:
            return (5, 1)
        return (j - 1, 0)

    gluings = [(octagon_side(i), octagon_side(j)) for i, j in ((0, 2), (1, 3), (4, 6), (5, 7))]
    gluings += [((k, 1), (k + 1, 2)) for k in range(5)]
    return build_decomposition(6, gluings, vertex_targets)


def fan_disk(n: int, vertex_targets=None) -> TriangularDecomposition:
    """Disk made of ``n`` triangles around one interior vertex (corner 0 of each)."""
    if n < 3:
        raise ValueError("a closed fan needs at least three triangles")
    gluings = [((k, 1), ((k + 1) % n, 2)) for k in range(n)]
    return build_decomposition(n, gluings, vertex_targets)


def single_triangle(vertex_targets=None) -> TriangularDecomposition:
    return build_decomposition(1, [], vertex_targets)


def triangle_double() -> TriangularDecomposition:
    """Two triangles glued along all three sides: a sphere, chi = 2."""
    return build_decomposition(2, [((0, i), (1, (3 - i) % 3)) for i in range(3)])
