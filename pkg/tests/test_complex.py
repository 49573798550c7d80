import itertools

import numpy as np
import pytest

from _support import random_complex
from idealdisk.complex import build_decomposition, flower, validate, vertex_edge_incidences
from idealdisk.errors import DanglingSide, DuplicateGluing, NonManifold, UnknownVertex
from idealdisk.meshes import fan_disk, genus2_octagon, single_triangle, triangle_double


def union_find_vertices(F, gluings):
    """Independent corner-orbit count from the raw gluing list."""
    parent = list(range(3 * F))

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for g in gluings:
        (t, i), (u, j) = g[0], g[1]
        flip = len(g) > 2 and g[2]
        a1, a2 = 3 * t + (i + 1) % 3, 3 * t + (i + 2) % 3
        b1, b2 = 3 * u + (j + 1) % 3, 3 * u + (j + 2) % 3
        pairs = [(a1, b1), (a2, b2)] if flip else [(a1, b2), (a2, b1)]
        for c, d in pairs:
            parent[find(c)] = find(d)
    return len({find(c) for c in range(3 * F)})


def test_single_triangle_counts():
    td = single_triangle()
    assert (td.F, td.E, td.V, td.euler_characteristic) == (1, 3, 3, 1)
    assert len(td.boundary_edges) == 3
    assert len(td.boundary_vertices) == 3


def test_genus2_counts():
    td = genus2_octagon()
    assert (td.F, td.E, td.V) == (6, 9, 1)
    assert td.euler_characteristic == -2
    assert td.boundary_edges == []


def test_triangle_double_is_a_sphere():
    td = triangle_double()
    assert (td.V, td.E, td.F, td.euler_characteristic) == (3, 3, 2, 2)


def test_validate_reports():
    rep = validate(genus2_octagon())
    assert rep.ok and rep.chi == -2 and rep.failures == []
    rep = validate(single_triangle())
    assert rep.ok and rep.chi == 1
    assert not validate(triangle_double()).admissible


def test_self_glued_side():
    with pytest.raises(NonManifold):
        build_decomposition(1, [((0, 0), (0, 0))])
    td = build_decomposition(1, [((0, 0), (0, 0))], strict=False)
    rep = validate(td)
    assert not rep.ok
    assert "NonManifold" in rep.failures
    assert rep.to_dict()["checks"]["no_self_glued_side"] is False


def test_build_errors():
    with pytest.raises(DuplicateGluing):
        build_decomposition(2, [((0, 0), (1, 0)), ((0, 0), (1, 1))])
    with pytest.raises(DanglingSide):
        build_decomposition(1, [((0, 3), (0, 1))])
    with pytest.raises(DanglingSide):
        build_decomposition(2, [((0, 0), (5, 1))])
    with pytest.raises(DanglingSide):
        build_decomposition(2, [{"a": [0, 0]}])
    with pytest.raises(DanglingSide):
        build_decomposition(2, [((0, 0, 1), (1, 0))])


def test_small_pairings_always_give_chains():
    # each corner touches two sides, so orbits can only be paths or cycles
    for F in (1, 2):
        sides = [(t, i) for t in range(F) for i in range(3)]
        pairs = list(itertools.combinations(sides, 2))
        for k in range(1, len(sides) // 2 + 1):
            for combo in itertools.combinations(pairs, k):
                used = [s for p in combo for s in p]
                if len(set(used)) < len(used):
                    continue
                for flips in itertools.product((False, True), repeat=k):
                    td = build_decomposition(F, [(a, b, f) for (a, b), f in zip(combo, flips)])
                    assert validate(td).ok


def test_flower_genus2():
    td = genus2_octagon()
    chain = flower(td, 0)
    assert len(chain) == 18
    assert sorted(3 * t + i for t, i in chain) == list(range(18))
    assert td.flowers[0].closed
    # every edge has both ends at the single vertex
    inc = vertex_edge_incidences(td, 0)
    assert len(inc) == 18
    assert all(inc.count(e) == 2 for e in range(td.E))


def test_flower_single_triangle():
    td = single_triangle()
    for v in range(3):
        assert len(flower(td, v)) == 1
        assert not td.flowers[v].closed
        assert len(vertex_edge_incidences(td, v)) == 2


def test_flower_degree_seven():
    td = fan_disk(7)
    centre = int(td.corner_vertex[0])
    fl = td.flowers[centre]
    assert fl.closed and len(fl.corners) == 7
    # consecutive corners share a side
    for k in range(7):
        nxt = (k + 1) % 7
        assert fl.out_sides[k] == td.side_partner[fl.in_sides[nxt]][0]
    for v in range(td.V):
        if v != centre:
            assert not td.flowers[v].closed and len(td.flowers[v].corners) == 2


def test_unknown_vertex():
    td = single_triangle()
    with pytest.raises(UnknownVertex):
        flower(td, 3)
    with pytest.raises(KeyError):
        flower(td, -1)
    with pytest.raises(UnknownVertex):
        build_decomposition(1, [], {"7": 1.0})


def test_edge_order_is_canonical():
    td = genus2_octagon()
    lows = [e.sides[0] for e in td.edges]
    assert lows == sorted(lows)
    for e in td.edges:
        assert list(e.sides) == sorted(e.sides)


def test_to_spec_roundtrip():
    td = genus2_octagon({"0": 4.0})
    again = build_decomposition(**td.to_spec())
    assert again.E == td.E and again.V == td.V
    assert np.array_equal(again.vertex_targets, td.vertex_targets)


@pytest.mark.parametrize("seed", range(40))
def test_random_complex_invariants(seed):
    rng = np.random.default_rng(seed)
    td = random_complex(rng, 12, flips=bool(seed % 2))
    nb = len(td.boundary_edges)
    assert 3 * td.F == 2 * td.E - nb
    assert sum(len(f.corners) for f in td.flowers) == 3 * td.F
    raw = [(g.a, g.b, g.flip) for g in td.gluings]
    assert td.V == union_find_vertices(td.F, raw)
    assert validate(td).ok
    # boundary flowers start and end on boundary sides
    for f in td.flowers:
        if not f.closed:
            assert td.side_partner[f.in_sides[0]] is None
            assert td.side_partner[f.out_sides[-1]] is None
