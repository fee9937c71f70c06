import math
from fractions import Fraction as F

import numpy as np
import pytest

from plcurrents.chain import PLChain, PolyChain, boundary, mass
from plcurrents.complex import SimplicialComplex, grid_complex, skeleton
from plcurrents.deform import (NoMassInSimplex, TriangulatedSpace, deform, radial_project,
                               select_center, snap_to_polyhedral)
from plcurrents.equality import chains_equal
from plcurrents.exact import barycentric
from plcurrents.fixtures import concentric_triangle, deformation_suite
from plcurrents.geom import AffineSimplex, inradius_sq, model_distance_sq

BIG = AffineSimplex(((0, 0), (3, 0), (0, 3)))
SQ = grid_complex(1, 1)
FACE = tuple(SQ.coords[v] for v in (0, 1, 3))


def winding(t: PLChain, b) -> float:
    """atan2 oracle: Σ θ·(signed angle swept about b) / 2π."""
    total = 0.0
    for (p, q), c in t.items():
        a0 = math.atan2(float(p[1] - b[1]), float(p[0] - b[0]))
        a1 = math.atan2(float(q[1] - b[1]), float(q[0] - b[0]))
        d = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
        total += c * d
    return total / (2 * math.pi)


def test_concentric_triangle():
    x, t = concentric_triangle()
    r = deform(x, t, seed=0)
    assert r.certificate
    assert dict(r.P.items()) == {(0, 1): 1, (0, 3): -1, (1, 3): 1}
    assert chains_equal(r.R, PLChain.zero(1, 2))
    # S sweeps the region between the shrunk triangle and the face: 1/2 − 1/8
    assert mass(r.S) == F(3, 8)
    assert all(r.supports.values())


def test_trivial_inputs():
    zero = deform(SQ, PLChain.zero(1, 2), seed=0)
    assert zero.P.is_zero() and zero.R.is_zero() and zero.S.is_zero() and zero.certificate
    poly = PolyChain(SQ, 1, {(0, 1): 1, (1, 3): 1}).to_pl()
    r = deform(SQ, poly, seed=0)
    assert r.P.to_pl() == poly and r.R.is_zero() and r.S.is_zero()


def test_dimension_above_complex_gives_zero_triple():
    x = skeleton(grid_complex(2, 2), 1)
    r = deform(x, PLChain(2, 2, [(FACE, 1)]), seed=0)
    assert r.P.is_zero() and r.R.is_zero() and r.S.is_zero()
    assert "exceeds dim X" in r.note and r.certificate


def test_radial_projection_keeps_winding():
    b = (F(1), F(1))
    pts = [(F(1, 2), F(1, 2)), (F(3, 2), F(1, 2)), (F(3, 2), F(4, 3)), (F(1, 2), F(3, 2))]
    loop = PLChain(1, 2, [((pts[i], pts[(i + 1) % 4]), 1) for i in range(4)])
    img = radial_project(BIG, b, loop)
    assert math.isclose(winding(loop, b), 1.0) and math.isclose(winding(img, b), 1.0)
    assert boundary(img).is_zero()
    for key, _ in img.items():
        for v in key:
            assert 0 in BIG.barycentric(v)
    assert chains_equal(img, boundary(PLChain(2, 2, [(BIG.vertices, 1)])))


def test_radial_projection_fixes_the_boundary():
    edge = PLChain(1, 2, [(((1, 0), (2, 0)), 1)])
    assert radial_project(BIG, (F(1), F(1)), edge) == edge


def test_center_without_mass_is_the_incenter():
    c = select_center(BIG, None, None, samples=4, seed=1)
    assert c.no_mass and c.K1 == 0 and c.K2 == 0
    assert c.bary == (F(1, 3),) * 3
    with pytest.raises(NoMassInSimplex):
        select_center(BIG, None, None, strict=True)


def dense_grid_integral(verts, b, n=400):
    """Centroid rule on n² congruent sub-triangles of a 2-simplex, ∫|y−b|^{-1} dy."""
    v = np.array(verts, float)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    up = (i + j) < n
    down = (i + j) < n - 1
    cents = []
    for mask, offs in ((up, (1 / 3, 1 / 3)), (down, (2 / 3, 2 / 3))):
        a = (i[mask] + offs[0]) / n
        c = (j[mask] + offs[1]) / n
        cents.append(v[0] + np.outer(a, v[1] - v[0]) + np.outer(c, v[2] - v[0]))
    pts = np.vstack(cents)
    area = abs(np.linalg.det(np.array([v[1] - v[0], v[2] - v[0]]))) / 2
    r = np.linalg.norm(pts - np.array(b, float), axis=1)
    return float((1 / r).sum() * area / n ** 2)


def test_center_integral_matches_dense_grid():
    mu1 = PLChain(2, 2, [(BIG.vertices, 1)])
    c = select_center(BIG, mu1, None, samples=8, seed=3, exponents=(-1, -1))
    oracle = dense_grid_integral(BIG.vertices, c.point) / float(mass(mu1))
    assert math.isfinite(c.K1)
    assert abs(c.K1 - oracle) <= 0.1 * oracle


def test_center_stays_in_the_inner_ball():
    mu1 = PLChain(1, 2, [(((0, 0), (3, 0)), 1)])
    for seed in range(5):
        c = select_center(BIG, mu1, None, samples=8, seed=seed, exponents=(-1, -1))
        o = (F(1, 3),) * 3
        assert 4 * model_distance_sq(c.bary, o) < inradius_sq(2)
        assert math.isfinite(c.K1) and c.K1 > 0


def coverage(t: PLChain, p) -> int:
    """Float oracle: signed count of terms containing p, orientation against the face."""
    ref = np.array(FACE, float)
    ref_sign = np.sign(np.linalg.det(np.array([ref[1] - ref[0], ref[2] - ref[0]])))
    total = 0
    for key, c in t.items():
        v = np.array(key, float)
        m = np.array([v[1] - v[0], v[2] - v[0]]).T
        lam = np.linalg.solve(m, np.array(p) - v[0])
        if lam.min() > 0 and lam.sum() < 1:
            total += c * int(np.sign(np.linalg.det(m)) * ref_sign)
    return total


def test_snap_counts_two_copies():
    x = TriangulatedSpace.from_complex(SQ)
    g = tuple(sum(p[i] for p in FACE) / 3 for i in range(2))
    a, b, c = FACE
    split = [((g, b, c), 1), ((a, g, c), 1), ((a, b, g), 1)]
    t = PLChain(2, 2, [(FACE, 1)] + split)
    snap = snap_to_polyhedral(x, 2, t, seed=0)
    assert snap.multiplicities == {(0, 1, 3): 2}
    rng = np.random.default_rng(0)
    for _ in range(5):
        w = rng.dirichlet(np.ones(3))
        p = w @ np.array(FACE, float)
        assert coverage(t, p) == 2
    assert chains_equal(snap.R, PLChain.zero(2, 2))


def test_snap_half_simplex():
    x = TriangulatedSpace.from_complex(SQ)
    half = PLChain(2, 2, [(((0, 0), (1, 0), (1, F(1, 2))), 1)])
    for seed in range(4):
        snap = snap_to_polyhedral(x, 2, half, seed=seed)
        assert set(snap.multiplicities.values()) <= {0, 1}
        assert chains_equal(half, snap.P.to_pl() + snap.R)


@pytest.mark.parametrize("name", ["path2d-0", "cycle2d-1", "triangle2d-0", "overlap2d", "path3d-2"])
def test_suite_members_are_certified(name):
    _, x, t = next(f for f in deformation_suite() if f[0] == name)
    r = deform(x, t, seed=7)
    assert r.certificate and r.boundary_check
    assert all(r.supports.values())
    assert all(math.isfinite(v) for row in r.ledger for v in row.ratios().values())
    again = deform(x, r.P.to_pl(), seed=11)
    assert again.P == r.P and again.R.is_zero() and again.S.is_zero()


def test_fast_equality_mode_agrees():
    _, x, t = next(f for f in deformation_suite() if f[0] == "cycle2d-0")
    assert deform(x, t, seed=2, equality="fast").certificate
