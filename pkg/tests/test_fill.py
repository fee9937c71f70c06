import itertools
import math
from fractions import Fraction as F

import pytest
import sympy

from plcurrents.chain import PolyChain, mass
from plcurrents.complex import boundary_matrix, grid_complex
from plcurrents.exact import SqrtSum
from plcurrents.fill import (NotABoundary, NotACycle, SubcomplexInvalid, check_certificate, cone_fill,
                             fillvol, flat_norm, grid_loop, isoperimetric_profile, undistortion_report)
from plcurrents.fixtures import annulus, box_and_surface, inner_block, l_shape, single_face, unit_grid


def unique_filling(c, t):
    """sympy oracle: ∂₂ is injective on a disk, so ∂S = t has exactly one solution."""
    bm = boundary_matrix(c, 2)
    a = sympy.Matrix(bm.dense())
    assert a.rank() == a.shape[1]
    rhs = sympy.Matrix([t.coeff(e) for e in bm.rows])
    sol, params = a.gauss_jordan_solve(rhs)
    assert params.shape[0] == 0
    return dict(zip(bm.cols, [F(str(v)) for v in sol]))


def bfs_values(c, t):
    """Objective values at every basic feasible solution of the split filling LP."""
    tops = c.of_dim(2)
    rows = c.of_dim(1)
    bm = boundary_matrix(c, 2)
    cols = []
    for j in range(len(tops)):
        col = [row[j] for row in bm.dense()]
        cols += [col, [-v for v in col]]
    vols = [sympy.sqrt(sympy.Rational(str(c.geometric(s).volume_sq()))) for s in tops for _ in (0, 1)]
    b = sympy.Matrix([t.coeff(e) for e in rows])
    m = sympy.Matrix(cols).T
    r = m.rank()
    out = set()
    for basis in itertools.combinations(range(len(cols)), r):
        sub = m[:, list(basis)]
        if sub.rank() < r:
            continue
        try:
            x, params = sub.gauss_jordan_solve(b)
        except ValueError:
            continue
        if params.shape[0] or any(v < 0 for v in x):
            continue
        out.add(sympy.nsimplify(sum(vols[j] * v for j, v in zip(basis, x))))
    return out


def test_single_face_area():
    c, t = single_face()
    for mode in ("lp", "ilp"):
        res = fillvol(c, t, mode)
        assert res.value == 3
        assert res.S.boundary() == t
    assert bfs_values(c, t) == {3}


def test_unit_grid_fills_with_area_one():
    c, t = unit_grid(4)
    lp = fillvol(c, t, "lp")
    ilp = fillvol(c, t, "ilp")
    assert lp.value == 1 and ilp.value == 1 and ilp.integral
    oracle = unique_filling(c, t)
    assert dict(lp.S.items()) == {s: v for s, v in oracle.items() if v}
    area = sum(abs(v) * c.geometric(s).volume().as_fraction() for s, v in oracle.items())
    assert area == 1


def test_boundary_feasibility_by_matrix_product():
    c, t = inner_block(4)
    res = fillvol(c, t, "ilp")
    bm = boundary_matrix(c, 2)
    out = bm.apply([res.S.coeff(s) for s in bm.cols])
    assert out == [t.coeff(e) for e in bm.rows]
    assert res.value == F(1, 4)


@pytest.mark.parametrize("fixture", [single_face, unit_grid, inner_block])
def test_lp_ilp_cone_ordering(fixture):
    c, t = fixture()
    lp = fillvol(c, t, "lp").value
    ilp = fillvol(c, t, "ilp").value
    pts = t.to_pl().support_points()
    apex = tuple(sum(p[i] for p in pts) / len(pts) for i in range(2))
    cone = cone_fill(t.to_pl(), apex)
    assert lp <= ilp <= cone.mass <= cone.bound


def test_cone_bound_with_apex_on_the_support():
    c, t = unit_grid(4)
    pl = t.to_pl()
    cf = cone_fill(pl, (0, 0))
    assert cf.diameter_bound is not None and cf.mass <= cf.diameter_bound
    assert cf.mass == 1
    assert cone_fill(pl, (F(1, 3), F(1, 7))).diameter_bound is None


def test_not_a_cycle():
    c = grid_complex(1, 1)
    with pytest.raises(NotACycle):
        fillvol(c, PolyChain(c, 1, {(0, 1): 1}))


def test_flat_norm():
    c, t = inner_block(4)
    res = flat_norm(c, t)
    assert res.value == fillvol(c, t).value == F(1, 4)
    assert res.U + res.V.boundary() == t
    c2, t2 = unit_grid(4)
    assert flat_norm(c2, t2).value <= t2.mass()
    # a long thin loop is cheaper to keep than to fill only when its area is large
    c3 = grid_complex(4, 1, F(1, 4))
    t3 = grid_loop(c3, ((0, 0), (4, 1)), 4)
    fn = flat_norm(c3, t3)
    assert fn.value == min(t3.mass(), fillvol(c3, t3).value)


def test_annulus_is_flagged_with_a_certificate():
    y, x, loops = annulus()
    t = PolyChain(x, 1, dict(loops[0].items()))
    with pytest.raises(NotABoundary) as info:
        fillvol(x, t)
    y_cert = info.value.certificate
    assert y_cert and check_certificate(x, t, y_cert)
    # independent check: the cocycle kills every column of ∂₂ and pairs to 1 with t
    bm = boundary_matrix(x, 2)
    vec = [y_cert.get(e, 0) for e in bm.rows]
    for j in range(len(bm.cols)):
        assert sum(row[j] * v for row, v in zip(bm.dense(), vec)) == 0
    assert sum(t.coeff(e) * v for e, v in zip(bm.rows, vec)) == 1
    rep = undistortion_report(y, x, loops)
    assert rep.obstructed == [0] and rep.infinite
    assert rep.rows[0].flag == "bounds in Y but not in X" and rep.rows[0].certificate
    assert rep.rows[1].ratio == 1.0


def test_identity_embedding_ratios_are_one():
    c, t = unit_grid(4)
    rep = undistortion_report(c, c, [t, grid_loop(c, ((1, 1), (2, 3)), 4)])
    assert all(fx == fy for fx, fy in rep.exact_ratios)
    assert rep.max_ratio == 1.0 and not rep.obstructed


def test_l_shape_ratios():
    y, x, loops = l_shape()
    rep = undistortion_report(y, x, loops)
    assert not rep.obstructed and rep.max_ratio == 1.0


def test_box_surface_ratio_is_three():
    y, x, loops = box_and_surface()
    rep = undistortion_report(y, x, loops)
    (fx, fy), = rep.exact_ratios
    assert fy == 4 and fx == 12 and rep.max_ratio == 3.0


def test_subcomplex_checks():
    y = grid_complex(2, 2)
    other = grid_complex(3, 3)
    with pytest.raises(SubcomplexInvalid):
        undistortion_report(y, other, [])
    shifted = grid_complex(2, 2, 1, origin=(1, 0))
    with pytest.raises(SubcomplexInvalid):
        undistortion_report(y, shifted, [])


def test_isoperimetric_profile():
    c = grid_complex(4, 4, F(1, 4))
    loops = [grid_loop(c, ((0, 0), (i, i)), 4) for i in (1, 2, 4)]
    rows = isoperimetric_profile(c, 1, loops)
    assert [r.fillvol for r in rows] == [F(1, 16), F(1, 4), F(1)]
    for r in rows:
        # squares have fill/mass² = 1/16
        assert math.isclose(r.ei_ratio, 1 / 16)
        assert r.integral and r.rho_ratio == 1.0
        assert r.filling_diameter_ratio == pytest.approx(1.0)
