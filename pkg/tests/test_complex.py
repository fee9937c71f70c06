import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plcurrents.complex import (DimensionOutOfRange, NotASimplex, SimplicialComplex, boundary_matrix,
                                boundary_subcomplex, cube_grid_complex, grid_complex, hull,
                                l2_distance, length_distance, realize_l2, skeleton, star,
                                vertex_length_distances)


def matmul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def test_single_triangle_boundary():
    c = SimplicialComplex.from_maximal([(0, 1, 2)])
    bm = boundary_matrix(c, 2)
    col = dict(zip(bm.rows, [row[0] for row in bm.dense()]))
    assert col == {(1, 2): 1, (0, 2): -1, (0, 1): 1}


random_complex = st.lists(st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True),
                          min_size=1, max_size=6).map(
    lambda ss: SimplicialComplex.from_maximal(ss, n_vertices=7))


@given(random_complex)
def test_boundary_of_boundary_vanishes(c):
    for k in range(2, c.dim + 1):
        prod = matmul(boundary_matrix(c, k - 1).dense(), boundary_matrix(c, k).dense())
        assert all(v == 0 for row in prod for v in row)


def test_dimension_out_of_range():
    c = grid_complex(1, 1)
    with pytest.raises(DimensionOutOfRange):
        boundary_matrix(c, 3)
    with pytest.raises(DimensionOutOfRange):
        boundary_matrix(c, 0)


def test_grid_square_boundary_is_the_outer_loop():
    c = grid_complex(2, 2)
    bm = boundary_matrix(c, 2)
    # every grid triangle (a,b,c) is listed counterclockwise, so its sorted order has a fixed sign
    signs = []
    for s in bm.cols:
        p = [c.coords[v] for v in s]
        cross = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0])
        signs.append(1 if cross > 0 else -1)
    out = bm.apply(signs)
    support = {e: v for e, v in zip(bm.rows, out) if v}
    assert len(support) == 8 and all(abs(v) == 1 for v in support.values())
    outer = {e for e in bm.rows if all(c.coords[v][0] in (0, 2) for v in e) and c.coords[e[0]][0] == c.coords[e[1]][0]
             or all(c.coords[v][1] in (0, 2) for v in e) and c.coords[e[0]][1] == c.coords[e[1]][1]}
    assert set(support) == outer


def test_star_hull_skeleton():
    c = grid_complex(2, 2)
    centre = 4
    st_ = star(c, (centre,))
    assert sum(1 for s in st_ if len(s) == 3) == 6
    assert sum(1 for s in st_ if len(s) == 2) == 6
    assert sum(1 for s in st_ if len(s) == 1) == 1
    top = c.maximal()[0]
    assert star(c, top) == {top}
    assert hull(c, [(3,)]).simplices == {(3,)}
    assert hull(c, points=[(F(1, 3), F(1, 3))]).simplices == {(0,), (4,), (0, 4)}
    h = hull(c, points=[(F(1, 2), F(1, 4))])
    assert max(len(s) for s in h.simplices) == 3 and len(h.simplices) == 7
    assert skeleton(c, 1).dim == 1
    with pytest.raises(NotASimplex):
        star(c, (0, 8))


def test_hull_is_minimal():
    c = grid_complex(3, 3)
    chosen = [c.maximal()[i] for i in (0, 5, 11)]
    h = hull(c, chosen)
    for s in h.maximal():
        assert s in chosen


def test_l2_realization_is_regular():
    c = SimplicialComplex.from_maximal([(0, 1, 2, 3)], epsilon=F(1, 2))
    pts = realize_l2(c)
    for a, b in itertools.combinations(range(4), 2):
        assert math.isclose(l2_distance(c, a, b), 0.5)
        d_embed = math.dist([float(x) for x in pts[a]], [float(x) for x in pts[b]])
        assert math.isclose(d_embed, 0.5 * math.sqrt(2))


def test_length_distance_examples():
    c = SimplicialComplex.from_maximal([(0, 1, 2), (1, 2, 3)])
    assert length_distance(c, 0, 0) == 0
    assert math.isclose(length_distance(c, 0, 1), 1.0)
    ests = [length_distance(c, 0, 3, d) for d in range(4)]
    assert all(a >= b - 1e-12 for a, b in zip(ests, ests[1:]))
    assert ests[0] == pytest.approx(2.0)
    assert ests[-1] == pytest.approx(math.sqrt(3), rel=1e-9)
    assert ests[-1] >= l2_distance(c, 0, 3) - 1e-12
    disjoint = SimplicialComplex.from_maximal([(0, 1), (2, 3)])
    assert length_distance(disjoint, 0, 3) == math.inf


def test_vertex_length_distances_match_pairwise():
    c = SimplicialComplex.from_maximal([(0, 1, 2), (1, 2, 3), (2, 3, 4)])
    d = vertex_length_distances(c, 1)
    for a, b in itertools.combinations(range(5), 2):
        assert d[a, b] == pytest.approx(length_distance(c, a, b, 1))


@given(st.integers(0, 3), st.integers(0, 3))
def test_length_and_l2_agree_inside_a_simplex(a, b):
    c = SimplicialComplex.from_maximal([(0, 1, 2, 3)])
    assert length_distance(c, a, b) == pytest.approx(l2_distance(c, a, b))


def test_grids_and_boundary_surface():
    c = cube_grid_complex(1, 1, 1)
    assert len(c.of_dim(3)) == 6
    assert all(c.geometric(s).volume_sq() == F(1, 36) for s in c.of_dim(3))
    surface = boundary_subcomplex(c)
    assert len(surface.of_dim(2)) == 12 and surface.dim == 2
    g = grid_complex(3, 2, F(1, 2))
    assert len(g.of_dim(2)) == 12 and g.coords[-1] == (F(3, 2), 1)
