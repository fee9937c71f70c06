import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plcurrents.nerve import (CloudError, EmptyCloud, MetricPointCloud, build_cover, build_nerve,
                              grid_cloud, line_cloud, psi, tau, verify_structure)

clouds = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=25, unique=True).map(
    lambda ps: MetricPointCloud.from_points([(F(x, 4), F(y, 4)) for x, y in ps]))
scales = st.sampled_from([F(1, 2), F(3, 4), F(1), F(3, 2)])


def sq(p, q):
    return sum((a - b) ** 2 for a, b in zip(p, q))


def oracle_nerve(points, sets, s):
    """Simplices from strict inequalities d(x,B)² < s²/4, by direct enumeration."""
    simplices = set()
    for x in points:
        near = tuple(i for i, b in enumerate(sets) if min(sq(x, points[j]) for j in b) < s * s / 4)
        simplices.add(near)
    return simplices


def test_single_point():
    cloud = MetricPointCloud.from_points([(0, 0)])
    nerve = build_nerve(build_cover(cloud, 1), cloud)
    assert nerve.complex.dim == 0 and nerve.phi0 == [0]
    assert nerve.psi == [{0: 1.0}]


def test_empty_and_bad_input():
    with pytest.raises(EmptyCloud):
        build_cover(MetricPointCloud.from_points([]), 1)
    with pytest.raises(CloudError):
        MetricPointCloud.from_distances([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(CloudError):
        MetricPointCloud.from_points([(0, 0), (1,)])
    ok = MetricPointCloud.from_distances([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert ok.dist(0, 2) == 2 and not ok.euclidean


def test_line_at_scale_two_has_isolated_vertices():
    cloud = line_cloud(11)
    cover = build_cover(cloud, 2)
    assert cover.sets == [[0, 1], [2, 3, 4], [5, 6, 7], [8, 9, 10]]
    assert cover.multiplicity == 2
    nerve = build_nerve(cover, cloud)
    # every cross-cell distance is at least s/2 = 1, so no τ pair is positive together
    assert nerve.complex.dim == 0 and len(nerve.complex.of_dim(0)) == 4


def test_line_at_scale_five_halves_is_a_path():
    cloud = line_cloud(11)
    cover = build_cover(cloud, F(5, 2))
    assert cover.sets == [[0, 1], [2, 3, 4], [5, 6, 7], [8, 9, 10]]
    nerve = build_nerve(cover, cloud)
    assert sorted(nerve.complex.of_dim(1)) == [(0, 1), (1, 2), (2, 3)]
    assert nerve.complex.dim == 1
    assert nerve.phi0 == [0, 3, 6, 9]


def test_grid_cover_multiplicity():
    cloud = grid_cloud(8)
    cover = build_cover(cloud, F(3, 7))
    assert cover.multiplicity <= 4
    nerve = build_nerve(cover, cloud)
    assert nerve.complex.dim <= cover.multiplicity - 1
    rep = verify_structure(nerve, cloud)
    assert rep.tau_bar_ok and rep.density_defect <= 1.0


def test_tau_and_psi_example():
    cloud = line_cloud(11)
    cover = build_cover(cloud, F(5, 2))
    # point 1 is in B_0; its distance to B_1 = {2,3,4} is 1
    assert tau(cloud, cover, 0, 1) == F(5, 4)
    assert tau(cloud, cover, 1, 1) == F(1, 4)
    assert tau(cloud, cover, 2, 1) == 0
    p = psi(cloud, cover, 1)
    assert p == pytest.approx({0: 5 / 6, 1: 1 / 6})


def test_determinism():
    cloud = grid_cloud(6)
    a = build_nerve(build_cover(cloud, F(1, 3)), cloud)
    b = build_nerve(build_cover(cloud, F(1, 3)), cloud)
    assert a.complex.simplices == b.complex.simplices and a.phi0 == b.phi0


@given(clouds, scales)
def test_cover_is_a_net(cloud, s):
    cover = build_cover(cloud, s)
    pts = cloud.points
    for a, b in itertools.combinations(cover.centers, 2):
        assert sq(pts[a], pts[b]) > s * s
    assert sorted(i for b in cover.sets for i in b) == list(range(len(pts)))
    for b, z in zip(cover.sets, cover.centers):
        assert all(sq(pts[i], pts[z]) <= s * s for i in b)
    assert cover.c <= 2


@given(clouds, scales)
def test_nerve_matches_enumeration(cloud, s):
    cover = build_cover(cloud, s)
    nerve = build_nerve(cover, cloud)
    want = oracle_nerve(cloud.points, cover.sets, s)
    assert set(nerve.complex.maximal()) <= want
    assert all(w in nerve.complex.simplices for w in want)
    assert nerve.complex.dim <= cover.multiplicity - 1


@given(clouds, scales)
def test_psi_is_a_partition_of_unity(cloud, s):
    cover = build_cover(cloud, s)
    nerve = build_nerve(cover, cloud)
    for x, p in enumerate(nerve.psi):
        assert math.isclose(sum(p.values()), 1.0)
        assert cover.owner[x] in p
    assert verify_structure(nerve, cloud).tau_bar_ok
