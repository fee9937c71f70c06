"""Exact Euclidean primitives: simplices, volumes, central projection, clipping."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Sequence

from .exact import (
    Point,
    SqrtSum,
    affine_combination,
    barycentric,
    det,
    dot,
    gram,
    point,
    solve,
    sub,
)


class GeometryError(ValueError):
    pass


class RayParallel(GeometryError):
    """The ray from the apex never meets the facet's affine hull."""


class ApexInput(GeometryError):
    """The point to project coincides with the projection center."""


@dataclass(frozen=True)
class AffineSimplex:
    """An ordered list of k+1 rational points; the order fixes the orientation."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(point(v) for v in self.vertices)
        if not vs:
            raise GeometryError("a simplex needs at least one vertex")
        d = len(vs[0])
        if any(len(v) != d for v in vs):
            raise GeometryError("vertices live in different ambient dimensions")
        object.__setattr__(self, "vertices", vs)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient(self) -> int:
        return len(self.vertices[0])

    def edges(self) -> list[Point]:
        v0 = self.vertices[0]
        return [sub(v, v0) for v in self.vertices[1:]]

    def volume_sq(self) -> Fraction:
        return simplex_volume_sq(self)

    def volume(self) -> SqrtSum:
        return simplex_volume(self)

    def is_degenerate(self) -> bool:
        return self.volume_sq() == 0

    def face(self, i: int) -> "AffineSimplex":
        return AffineSimplex(self.vertices[:i] + self.vertices[i + 1:])

    def centroid(self) -> Point:
        w = Fraction(1, len(self.vertices))
        return affine_combination([w] * len(self.vertices), self.vertices)

    def barycentric(self, x: Sequence[Fraction]) -> list[Fraction] | None:
        return barycentric(point(x), self.vertices)

    def contains(self, x: Sequence[Fraction]) -> bool:
        lam = self.barycentric(x)
        return lam is not None and all(c >= 0 for c in lam)


def simplex_volume_sq(s: AffineSimplex) -> Fraction:
    """Squared k-volume, det(G)/(k!)² with G the Gram matrix of the edge vectors."""
    k = s.dim
    if k == 0:
        return Fraction(1)
    if k > s.ambient:
        return Fraction(0)
    g = det(gram(s.edges()))
    return g / (factorial(k) ** 2) if g > 0 else Fraction(0)


def simplex_volume(s: AffineSimplex) -> SqrtSum:
    return SqrtSum.sqrt(simplex_volume_sq(s))


def inradius_incenter(m: int) -> tuple[SqrtSum, tuple[Fraction, ...]]:
    """Inradius and incenter of the regular side-1 m-simplex.

    The incenter is returned in barycentric coordinates; r_m² = 1/(2m(m+1)).
    """
    if m < 1:
        raise GeometryError("dimension must be at least 1")
    r = SqrtSum.sqrt(Fraction(1, 2 * m * (m + 1)))
    return r, tuple(Fraction(1, m + 1) for _ in range(m + 1))


def inradius_sq(m: int) -> Fraction:
    return Fraction(1, 2 * m * (m + 1))


def model_distance_sq(lam: Sequence[Fraction], mu: Sequence[Fraction]) -> Fraction:
    """Squared distance between two barycentric points of the regular side-1 simplex."""
    return sum(((a - b) ** 2 for a, b in zip(lam, mu)), Fraction(0)) / 2


def central_projection(b: Sequence, facet: AffineSimplex, x: Sequence) -> Point:
    """Intersect the ray from b through x with aff(facet)."""
    b = point(b)
    x = point(x)
    if b == x:
        raise ApexInput("x coincides with the projection center")
    direction = sub(x, b)
    f0 = facet.vertices[0]
    fedges = facet.edges()
    d = len(b)
    # b + t·dir = f0 + Σ c_j e_j
    a = [[direction[i]] + [-e[i] for e in fedges] for i in range(d)]
    rhs = sub(f0, b)
    try:
        sol = solve(a, rhs)
    except ValueError:
        raise RayParallel("ray direction lies in the facet's direction space") from None
    if sol is None:
        raise RayParallel("ray does not meet the facet's affine hull")
    t = sol[0]
    if t <= 0:
        raise RayParallel("the facet lies behind the projection center")
    return tuple(bi + t * di for bi, di in zip(b, direction))


# ----------------------------------------------------------------------------
# Cone regions and radial projection

@dataclass(frozen=True)
class ConeRegion:
    """Points of the parent simplex whose ray from the apex exits through one facet.

    Each half-space is a vector ``a`` over the parent's barycentric
    coordinates λ and reads ``a·λ(x) ≥ 0``.
    """

    apex: Point
    parent: AffineSimplex
    facet_index: int
    halfspaces: tuple = field(default=())

    @property
    def facet(self) -> AffineSimplex:
        return self.parent.face(self.facet_index)

    def contains(self, x) -> bool:
        lam = self.parent.barycentric(x)
        if lam is None or any(c < 0 for c in lam):
            return False
        return all(dot(a, lam) >= 0 for a in self.halfspaces)


def cone_regions(parent: AffineSimplex, b: Sequence) -> list[ConeRegion]:
    """The facet regions of ``parent`` for the center b (b must be interior)."""
    b = point(b)
    beta = parent.barycentric(b)
    if beta is None or any(c <= 0 for c in beta):
        raise GeometryError("center must lie in the interior of the parent simplex")
    m = parent.dim
    regions = []
    for j in range(m + 1):
        hs = []
        for i in range(m + 1):
            if i == j:
                continue
            a = [Fraction(0)] * (m + 1)
            a[i] += 1 / beta[i]
            a[j] -= 1 / beta[j]
            hs.append(tuple(a))
        regions.append(ConeRegion(b, parent, j, tuple(hs)))
    return regions


def radial_point(beta: Sequence[Fraction], lam: Sequence[Fraction]) -> tuple[list[Fraction], int]:
    """Project a barycentric point away from the center β onto the boundary.

    Returns the projected barycentric coordinates and the index of the facet hit
    (smallest index among ties).
    """
    j = min(range(len(lam)), key=lambda i: (lam[i] / beta[i], i))
    if lam[j] >= beta[j]:
        raise ApexInput("point coincides with the projection center")
    t = beta[j] / (beta[j] - lam[j])
    out = [bi + t * (li - bi) for bi, li in zip(beta, lam)]
    out[j] = Fraction(0)
    return out, j


# ----------------------------------------------------------------------------
# Convex polytopes inside a simplex, clipped by half-spaces

class Polytope:
    """A full-dimensional convex polytope inside a base k-simplex.

    Points are stored by barycentric coordinates μ with respect to the base
    simplex, together with the set of constraints tight at each vertex.  That
    bookkeeping is enough for clipping and for a face-consistent pulling
    triangulation.
    """

    def __init__(self, base: Sequence[Point]):
        self.base = tuple(base)
        k = len(self.base) - 1
        self.k = k
        self.constraints: list[tuple[Fraction, ...]] = []
        for i in range(k + 1):
            self.constraints.append(tuple(Fraction(int(i == j)) for j in range(k + 1)))
        self.verts: list[tuple[Fraction, ...]] = [c for c in self.constraints]
        self.tight: list[frozenset[int]] = [
            frozenset(j for j in range(k + 1) if j != i) for i in range(k + 1)
        ]

    def _copy(self) -> "Polytope":
        out = Polytope.__new__(Polytope)
        out.base = self.base
        out.k = self.k
        out.constraints = list(self.constraints)
        out.verts = list(self.verts)
        out.tight = list(self.tight)
        return out

    def values_of(self, g: Callable[[Point], Fraction]) -> tuple[Fraction, ...]:
        """Coefficient vector of an affine functional given as a callable."""
        return tuple(Fraction(g(v)) for v in self.base)

    def _adjacent(self, u: int, v: int) -> bool:
        common = self.tight[u] & self.tight[v]
        if len(common) < self.k - 1:
            return False
        for w in range(len(self.verts)):
            if w != u and w != v and common <= self.tight[w]:
                return False
        return True

    def clip(self, coeffs: Sequence[Fraction]) -> "Polytope | None":
        """Intersect with {μ : coeffs·μ ≥ 0}; None when the result has measure zero."""
        coeffs = tuple(Fraction(c) for c in coeffs)
        return self._clip(coeffs, [dot(coeffs, mu) for mu in self.verts])

    def _clip(self, coeffs: tuple, vals: list) -> "Polytope | None":
        if all(v <= 0 for v in vals):
            return None
        cid = len(self.constraints)
        out = self._copy()
        out.constraints.append(coeffs)
        if all(v >= 0 for v in vals):
            out.tight = [t | {cid} if v == 0 else t for t, v in zip(self.tight, vals)]
            return out
        verts, tight = [], []
        for mu, t, v in zip(self.verts, self.tight, vals):
            if v >= 0:
                verts.append(mu)
                tight.append(t | {cid} if v == 0 else t)
        n = len(self.verts)
        for u in range(n):
            if vals[u] <= 0:
                continue
            for w in range(n):
                if vals[w] >= 0 or not self._adjacent(u, w):
                    continue
                a, b = vals[u], vals[w]
                lam = a / (a - b)
                mu = tuple(x + lam * (y - x) for x, y in zip(self.verts[u], self.verts[w]))
                verts.append(mu)
                tight.append((self.tight[u] & self.tight[w]) | {cid})
        out.verts = verts
        out.tight = tight
        return out

    def split(self, coeffs: Sequence[Fraction]) -> tuple["Polytope | None", "Polytope | None"]:
        coeffs = tuple(Fraction(c) for c in coeffs)
        vals = [dot(coeffs, mu) for mu in self.verts]
        return self._clip(coeffs, vals), self._clip(tuple(-c for c in coeffs), [-v for v in vals])

    def points(self) -> list[Point]:
        return [affine_combination(mu, self.base) for mu in self.verts]

    def interior_point(self) -> Point:
        n = len(self.verts)
        w = [Fraction(1, n)] * n
        mu = affine_combination(w, self.verts)
        return affine_combination(mu, self.base)

    def _affine_dim(self, idx: frozenset[int]) -> int:
        idx = sorted(idx)
        if len(idx) <= 1:
            return len(idx) - 1
        from .exact import rank

        m0 = self.verts[idx[0]]
        return rank([sub(self.verts[i], m0) for i in idx[1:]])

    def triangulate(self) -> list[tuple[tuple[Point, ...], int]]:
        """Pulling triangulation from lexicographically smallest vertices.

        Every face is triangulated by coning from its own smallest vertex, so
        two polytopes sharing a face produce identical simplices on it.
        Returns (vertex points, orientation sign relative to the base simplex).
        """
        pts = self.points()
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        rank_of = {i: r for r, i in enumerate(order)}
        memo: dict[frozenset[int], list[tuple[int, ...]]] = {}
        dims: dict[frozenset[int], int] = {}

        def dim_of(face: frozenset[int]) -> int:
            if face not in dims:
                dims[face] = self._affine_dim(face)
            return dims[face]

        def facets(face: frozenset[int], g: int) -> list[frozenset[int]]:
            seen = []
            for c in range(len(self.constraints)):
                sub_face = frozenset(i for i in face if c in self.tight[i])
                if len(sub_face) < g or sub_face == face or sub_face in seen:
                    continue
                if dim_of(sub_face) == g - 1:
                    seen.append(sub_face)
            return seen

        def pull(face: frozenset[int], g: int) -> list[tuple[int, ...]]:
            if face in memo:
                return memo[face]
            if g == 0:
                res = [(next(iter(face)),)]
            else:
                apex = min(face, key=lambda i: rank_of[i])
                res = []
                for f in facets(face, g):
                    if apex in f:
                        continue
                    for s in pull(f, g - 1):
                        res.append((apex,) + s)
            memo[face] = res
            return res

        full = frozenset(range(len(self.verts)))
        out = []
        for simplex in pull(full, self.k):
            mus = [self.verts[i] for i in simplex]
            if self.k == 0:
                sign = 1
            else:
                m0 = mus[0]
                rows = [[a - b for a, b in zip(mu[1:], m0[1:])] for mu in mus[1:]]
                dd = det(rows)
                if dd == 0:
                    continue
                sign = 1 if dd > 0 else -1
            out.append((tuple(pts[i] for i in simplex), sign))
        return out


def clip_simplex_by_halfspaces(
    s: AffineSimplex, functionals: Iterable[Callable[[Point], Fraction]]
) -> list[tuple[tuple[Point, ...], int]]:
    """Triangulate s ∩ {g ≥ 0 for all g}; pieces carry orientation signs."""
    poly: Polytope | None = Polytope(s.vertices)
    for g in functionals:
        poly = poly.clip(poly.values_of(g))
        if poly is None:
            return []
    return poly.triangulate()


def oriented(points: Sequence[Point], sign: int) -> AffineSimplex:
    pts = list(points)
    if sign < 0:
        if len(pts) < 2:
            raise GeometryError("cannot reverse the orientation of a point")
        pts[0], pts[1] = pts[1], pts[0]
    return AffineSimplex(tuple(pts))


def clip_simplex_by_region(s: AffineSimplex, r: ConeRegion) -> list[AffineSimplex]:
    """Triangulate s ∩ r with orientations inherited from s."""
    lams = []
    for v in s.vertices:
        lam = r.parent.barycentric(v)
        if lam is None or any(c < 0 for c in lam):
            raise GeometryError("simplex is not inside the region's parent simplex")
        lams.append(lam)
    if s.dim == 0:
        return [s] if all(dot(a, lams[0]) >= 0 for a in r.halfspaces) else []
    if s.is_degenerate():
        return []
    poly: Polytope | None = Polytope(s.vertices)
    for a in r.halfspaces:
        poly = poly.clip(tuple(dot(a, lam) for lam in lams))
        if poly is None:
            return []
    return [oriented(pts, sign) for pts, sign in poly.triangulate()]
