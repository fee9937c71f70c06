import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plcurrents.chain import (Ball, ChainError, InconsistentFaceImages, PLChain, PolyChain,
                              TermStraddlesRegion, augmentation, boundary, cone, local_mass, mass,
                              prism, pushforward, realization_chain, support_diameter_sq, transport)
from plcurrents.complex import SimplicialComplex, grid_complex
from plcurrents.equality import chains_equal
from plcurrents.forms import TestForm, evaluate, monomial_form, random_form

from conftest import chains


def float_mass(t: PLChain) -> float:
    """numpy oracle: Σ|θ|·sqrt(det(EEᵀ))/k!."""
    total = 0.0
    for key, c in t.items():
        v = np.array(key, dtype=float)
        e = v[1:] - v[0]
        total += abs(c) * math.sqrt(max(np.linalg.det(e @ e.T), 0.0)) / math.factorial(t.k)
    return total


UNIT_SQUARE = PLChain(2, 2, [(((0, 0), (1, 0), (1, 1)), 1), (((0, 0), (1, 1), (0, 1)), 1)])


def test_square_boundary_cancels_the_diagonal():
    b = boundary(UNIT_SQUARE)
    assert len(b) == 4
    assert mass(b) == 4
    assert boundary(b).is_zero()


def test_coefficients_merge_and_orientation():
    t = PLChain(1, 2, [(((0, 0), (1, 0)), 1), (((1, 0), (0, 0)), 1)])
    assert t.is_zero()
    assert PLChain(1, 1, [(((0,), (0,)), 5)]).is_zero()
    assert PLChain(2, 2, [(((0, 0), (1, 1), (2, 2)), 1)]).is_zero()


def test_mass_examples():
    t = PLChain(1, 2, [(((0, 0), (1, 0)), 1), (((0, 0), (0, F(1, 4))), -1)])
    assert mass(t).as_fraction() == F(5, 4)
    diag = PLChain(1, 2, [(((0, 0), (1, 1)), 3)])
    assert math.isclose(float(mass(diag)), 3 * math.sqrt(2))


@given(chains(2, 3))
def test_mass_matches_numpy(t):
    assert math.isclose(float(mass(t)), float_mass(t), rel_tol=1e-9, abs_tol=1e-12)


@given(chains(2, 3))
def test_boundary_squares_to_zero(t):
    assert boundary(boundary(t)).is_zero()


def test_augmentation():
    assert augmentation(boundary(PLChain(1, 2, [(((0, 0), (3, 1)), 2)]))) == 0
    with pytest.raises(ChainError):
        augmentation(UNIT_SQUARE)


def test_pushforward_scales_mass():
    t = pushforward(lambda x: (2 * x[0], 2 * x[1]), UNIT_SQUARE)
    assert mass(t) == 4
    proj = pushforward(lambda x: (x[0],), PLChain(1, 2, [(((0, 0), (3, 4)), 1)]))
    # |cos| of the angle to the x-axis is 3/5
    assert mass(proj) == 3


def test_pushforward_face_images_must_agree():
    t = PLChain(1, 2, [(((0, 0), (1, 0)), 1), (((1, 0), (2, 0)), 1)])
    with pytest.raises(InconsistentFaceImages):
        pushforward([[(0, 0), (1, 1)], [(1, 0), (2, 2)]], t)


def test_cone_over_square_boundary():
    c = cone((F(1, 2), F(1, 2)), boundary(UNIT_SQUARE))
    assert mass(c) == 1
    assert chains_equal(c, UNIT_SQUARE)


@given(chains(1, 2))
def test_cone_formula(t):
    a = (F(1, 3), F(-2, 7))
    lhs = boundary(cone(a, t))
    rhs = t - cone(a, boundary(t))
    assert chains_equal(lhs, rhs)


def test_prism_of_translation():
    seg = PLChain(1, 2, [(((0, 0), (1, 0)), 1)])
    p = prism(lambda x: x, lambda x: (x[0], x[1] + 1), seg)
    assert mass(p) == 1


@given(chains(1, 2, max_terms=2))
def test_prism_homotopy_formula(t):
    h1 = lambda x: (x[0] / 2 + 1, x[1] - x[0] / 3)
    p = prism(lambda x: x, h1, t)
    lhs = boundary(p)
    rhs = pushforward(h1, t) - t - prism(lambda x: x, h1, boundary(t))
    assert chains_equal(lhs, rhs)


def test_local_mass_regions():
    t = PLChain(1, 2, [(((0, 0), (1, 0)), 1), (((5, 5), (6, 5)), 2)])
    assert local_mass(t, Ball((0, 0), F(4))) == 1
    assert local_mass(t, Ball((20, 20), F(1))) == 0
    with pytest.raises(TermStraddlesRegion):
        local_mass(t, Ball((0, 0), F(1, 4)))
    assert local_mass(t, ((-1, -1), (8, -1), (-1, 8))) == 1


def test_support_diameter():
    assert support_diameter_sq(UNIT_SQUARE) == 2


def test_polychain_boundary_and_mass():
    c = grid_complex(2, 2)
    faces = {s: 1 for s in c.of_dim(2)}
    # orient every grid triangle counterclockwise
    signed = {}
    for s in faces:
        p = [c.coords[v] for v in s]
        cross = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0])
        signed[s] = 1 if cross > 0 else -1
    ch = PolyChain(c, 2, signed)
    assert ch.mass() == 4
    assert ch.boundary().mass() == 8
    assert chains_equal(ch.boundary().to_pl(), boundary(ch.to_pl()))
    assert PolyChain(c, 1, {(1, 0): 1}).coeff((0, 1)) == -1
    with pytest.raises(ChainError):
        PolyChain(c, 1, {(0, 8): 1})


def test_abstract_polychain_mass_is_regular():
    c = SimplicialComplex.from_maximal([(0, 1, 2)], epsilon=1)
    tri = PolyChain(c, 2, {(0, 1, 2): 1})
    assert math.isclose(float(tri.mass()), math.sqrt(3) / 4)
    assert PolyChain(c, 1, {(0, 1): 1}).mass() == 1


def test_transport_prism_identity():
    c = grid_complex(1, 1)
    p = PolyChain(c, 1, {(0, 1): 1})
    delta = F(1, 10)
    phi0 = [(x, y + delta) for x, y in c.coords]
    lam, gam = transport(c, phi0, p)
    assert mass(gam) == delta
    h = realization_chain(c, p)
    _, gam_b = transport(c, phi0, p.boundary())
    assert chains_equal(boundary(gam), lam - h - gam_b)


def test_evaluate_examples():
    seg = PLChain(1, 2, [(((0, 0), (1, 0)), 1)])
    assert evaluate(seg, monomial_form(2, (0,), (0, 0))) == 1
    # x dy over the boundary of the unit square is its area
    assert evaluate(boundary(UNIT_SQUARE), monomial_form(2, (1,), (1, 0))) == 1
    dxdy = TestForm.make(2, 2, {(1, 0): {(0, 0): 1}})
    assert evaluate(UNIT_SQUARE, dxdy) == -1


@given(chains(2, 3), st.integers(0, 2 ** 32 - 1))
def test_stokes(t, seed):
    w = random_form(1, 3, 2, np.random.default_rng(seed))
    assert evaluate(boundary(t), w) == evaluate(t, w.d())
