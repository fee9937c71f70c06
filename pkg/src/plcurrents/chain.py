"""Integer PL chains in Euclidean space and polyhedral chains on complexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .complex import SimplicialComplex, boundary_faces
from .exact import (
    Point,
    SqrtSum,
    barycentric,
    dot,
    point,
    squared_distance,
    sqrt_sum_total,
    sub,
)
from .geom import AffineSimplex, Polytope, simplex_volume_sq


class ChainError(ValueError):
    pass


class InconsistentFaceImages(ChainError):
    pass


class TermStraddlesRegion(ChainError):
    pass


def _parity(seq: Sequence) -> int:
    """Sign of the permutation sorting seq (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[j] < seq[i]:
                sign = -sign
    return sign


def canonical_key(vertices: Sequence[Point]) -> tuple[tuple[Point, ...], int] | None:
    """(sorted vertices, orientation sign), or None when a vertex repeats."""
    key = tuple(sorted(vertices))
    for a, b in zip(key, key[1:]):
        if a == b:
            return None
    return key, _parity(vertices)


def _is_degenerate(key: tuple[Point, ...]) -> bool:
    if len(key) <= 2:
        return False
    return simplex_volume_sq(AffineSimplex(key)) == 0


class PLChain:
    """Σ θ_i ⟦σ_i⟧ over oriented affine k-simplices in ℝ^d with integer θ_i.

    Terms are keyed by their sorted vertex tuple; the coefficient carries the
    orientation relative to that order.  Degenerate and zero terms are
    dropped, so the zero chain has a unique representation.
    """

    __slots__ = ("k", "ambient", "_terms")

    def __init__(self, k: int, ambient: int,
                 terms: Iterable[tuple[Sequence[Sequence] | AffineSimplex, int]] = (),
                 *, _trusted: dict | None = None):
        self.k = int(k)
        self.ambient = int(ambient)
        if _trusted is not None:
            self._terms = _trusted
            return
        acc: dict[tuple[Point, ...], int] = {}
        for verts, coeff in terms:
            if isinstance(verts, AffineSimplex):
                verts = verts.vertices
            verts = tuple(point(v) for v in verts)
            if len(verts) != self.k + 1 or any(len(v) != self.ambient for v in verts):
                raise ChainError("term does not match the chain's dimension or ambient")
            ck = canonical_key(verts)
            if ck is None:
                continue
            key, sgn = ck
            acc[key] = acc.get(key, 0) + sgn * int(coeff)
        self._terms = {key: c for key, c in acc.items() if c and not _is_degenerate(key)}

    @classmethod
    def _from_dict(cls, k, ambient, acc: Mapping, check_degenerate=True) -> "PLChain":
        terms = {key: c for key, c in acc.items() if c}
        if check_degenerate:
            terms = {key: c for key, c in terms.items() if not _is_degenerate(key)}
        return cls(k, ambient, _trusted=terms)

    @classmethod
    def zero(cls, k: int, ambient: int) -> "PLChain":
        return cls(k, ambient)

    @classmethod
    def simplex(cls, vertices: Sequence[Sequence], coeff: int = 1) -> "PLChain":
        verts = tuple(point(v) for v in vertices)
        return cls(len(verts) - 1, len(verts[0]), [(verts, coeff)])

    def items(self) -> Iterator[tuple[tuple[Point, ...], int]]:
        return iter(sorted(self._terms.items()))

    def terms(self) -> list[tuple[AffineSimplex, int]]:
        return [(AffineSimplex(key), c) for key, c in self.items()]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other: "PLChain"):
        if not isinstance(other, PLChain) or other.k != self.k or other.ambient != self.ambient:
            raise ChainError("chains differ in dimension or ambient")

    def __add__(self, other: "PLChain") -> "PLChain":
        self._check(other)
        acc = dict(self._terms)
        for key, c in other._terms.items():
            acc[key] = acc.get(key, 0) + c
        return PLChain._from_dict(self.k, self.ambient, acc, check_degenerate=False)

    def __neg__(self) -> "PLChain":
        return PLChain(self.k, self.ambient, _trusted={key: -c for key, c in self._terms.items()})

    def __sub__(self, other: "PLChain") -> "PLChain":
        return self + (-other)

    def __mul__(self, n: int) -> "PLChain":
        n = int(n)
        if n == 0:
            return PLChain.zero(self.k, self.ambient)
        return PLChain(self.k, self.ambient, _trusted={key: n * c for key, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, PLChain) and self.k == other.k
                and self.ambient == other.ambient and self._terms == other._terms)

    def __hash__(self):
        return hash((self.k, self.ambient, tuple(sorted(self._terms.items()))))

    def __repr__(self) -> str:
        return f"PLChain(k={self.k}, ambient={self.ambient}, terms={len(self._terms)})"

    def support_points(self) -> set[Point]:
        return {v for key in self._terms for v in key}


def boundary(t: PLChain) -> PLChain:
    if t.k < 1:
        raise ChainError("boundary of a 0-chain is not defined here")
    acc: dict[tuple[Point, ...], int] = {}
    for key, c in t._terms.items():
        for i in range(len(key)):
            face = key[:i] + key[i + 1:]
            acc[face] = acc.get(face, 0) + (-1) ** i * c
    return PLChain._from_dict(t.k - 1, t.ambient, acc, check_degenerate=False)


def augmentation(t: PLChain) -> int:
    """T(1) for a 0-chain: the sum of coefficients."""
    if t.k != 0:
        raise ChainError("augmentation is defined on 0-chains")
    return sum(t._terms.values())


def term_volume_sq(key: Sequence[Point]) -> Fraction:
    return simplex_volume_sq(AffineSimplex(tuple(key)))


def mass(t: PLChain) -> SqrtSum:
    """Σ |θ_i|·vol(σ_i), exact."""
    return sqrt_sum_total(SqrtSum.sqrt(term_volume_sq(key)) * abs(c) for key, c in t._terms.items())


def _point_simplex_distance_sq(x: Point, verts: Sequence[Point]) -> Fraction:
    """Exact squared distance from x to a simplex, by enumerating faces."""
    from itertools import combinations

    from .exact import gram, solve

    best = None
    n = len(verts)
    for r in range(1, n + 1):
        for face in combinations(verts, r):
            v0 = face[0]
            edges = [sub(v, v0) for v in face[1:]]
            if edges:
                g = gram(edges)
                rhs = [dot(e, sub(x, v0)) for e in edges]
                try:
                    coef = solve(g, rhs)
                except ValueError:
                    continue
                if coef is None or any(c < 0 for c in coef) or sum(coef) > 1:
                    continue
                proj = list(v0)
                for c, e in zip(coef, edges):
                    proj = [p + c * ei for p, ei in zip(proj, e)]
            else:
                proj = v0
            dsq = squared_distance(x, proj)
            if best is None or dsq < best:
                best = dsq
    return best


@dataclass(frozen=True)
class Ball:
    center: Point
    radius_sq: Fraction


def _term_region_status(key: tuple[Point, ...], region) -> str:
    """'in', 'out' or 'straddle' for the region's interior."""
    if isinstance(region, Ball):
        c = point(region.center)
        if all(squared_distance(v, c) < region.radius_sq for v in key):
            return "in"
        if _point_simplex_distance_sq(c, key) >= region.radius_sq:
            return "out"
        return "straddle"
    if not isinstance(region, AffineSimplex):
        region = AffineSimplex(tuple(region))
    lams = [barycentric(v, region.vertices) for v in key]
    if any(l is None for l in lams):
        # not inside aff(region): the overlap has measure zero
        return "out"
    if all(all(c >= 0 for c in l) for l in lams):
        if all(any(l[i] > 0 for l in lams) for i in range(region.dim + 1)):
            return "in"
        return "out"
    poly = Polytope(key)
    for i in range(region.dim + 1):
        poly = poly.clip(tuple(l[i] for l in lams))
        if poly is None:
            return "out"
    return "straddle"


def local_mass(t: PLChain, region) -> SqrtSum:
    """Mass of the terms inside the open region (an AffineSimplex or a Ball)."""
    total = []
    for key, c in t._terms.items():
        status = _term_region_status(key, region)
        if status == "straddle":
            raise TermStraddlesRegion(f"term {key} crosses the region boundary")
        if status == "in":
            total.append(SqrtSum.sqrt(term_volume_sq(key)) * abs(c))
    return sqrt_sum_total(total)


# ----------------------------------------------------------------------------
# Maps, cones, prisms

VertexMap = Callable[[Point], Point]


def _as_vertex_map(t: PLChain, f) -> VertexMap:
    """Accept a callable or per-term image lists aligned with t.items()."""
    if callable(f):
        return lambda x: point(f(x))
    table: dict[Point, Point] = {}
    for (key, _), images in zip(t.items(), f):
        if len(images) != len(key):
            raise InconsistentFaceImages("image list length does not match the term")
        for v, img in zip(key, images):
            img = point(img)
            if table.setdefault(v, img) != img:
                raise InconsistentFaceImages(f"vertex {v} has two different images")
    return table.__getitem__


def pushforward(f, t: PLChain) -> PLChain:
    """Term-by-term affine pushforward determined by vertex images."""
    g = _as_vertex_map(t, f)
    images = {v: g(v) for v in t.support_points()}
    if not images:
        return PLChain.zero(t.k, t.ambient)
    ambient = len(next(iter(images.values())))
    return PLChain(t.k, ambient, [(tuple(images[v] for v in key), c) for key, c in t._terms.items()])


def cone(a: Sequence, t: PLChain) -> PLChain:
    """Join every term with the apex a (placed first), so ∂cone(a,T) = T − cone(a,∂T)."""
    a = point(a)
    return PLChain(t.k + 1, t.ambient, [((a,) + key, c) for key, c in t._terms.items()])


def prism(h0, h1, t: PLChain) -> PLChain:
    """Straight-line prism Σ_i (−1)^i [h0(v_0)…h0(v_i) h1(v_i)…h1(v_k)] per term."""
    g0 = _as_vertex_map(t, h0)
    g1 = _as_vertex_map(t, h1)
    terms = []
    for key, c in t._terms.items():
        a = [g0(v) for v in key]
        b = [g1(v) for v in key]
        for i in range(len(key)):
            terms.append((tuple(a[: i + 1]) + tuple(b[i:]), (-1) ** i * c))
    ambient = len(terms[0][0][0]) if terms else t.ambient
    return PLChain(t.k + 1, ambient, terms)


def support_radius_sq(t: PLChain, a: Sequence) -> Fraction:
    """sup_{x ∈ spt T} |x − a|², attained at a vertex."""
    a = point(a)
    return max((squared_distance(v, a) for v in t.support_points()), default=Fraction(0))


def support_diameter_sq(t: PLChain) -> Fraction:
    pts = sorted(t.support_points())
    best = Fraction(0)
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            best = max(best, squared_distance(p, q))
    return best


# ----------------------------------------------------------------------------
# Polyhedral chains on a complex

class PolyChain:
    """Coefficients on oriented k-simplices of a complex (sorted order positive)."""

    __slots__ = ("complex", "k", "_coeffs")

    def __init__(self, c: SimplicialComplex, k: int, coeffs: Mapping[Sequence[int], int | Fraction] = ()):
        self.complex = c
        self.k = int(k)
        acc: dict[tuple[int, ...], Fraction | int] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for s, v in items:
            key = tuple(sorted(s))
            if len(key) != self.k + 1 or key not in c.simplices:
                raise ChainError(f"{s} is not a {self.k}-simplex of the complex")
            sgn = _parity(s)
            acc[key] = acc.get(key, 0) + sgn * v
        self._coeffs = {s: (int(v) if isinstance(v, Fraction) and v.denominator == 1 else v)
                        for s, v in acc.items() if v}

    def items(self):
        return iter(sorted(self._coeffs.items()))

    def coeff(self, s: Sequence[int]):
        key = tuple(sorted(s))
        return _parity(s) * self._coeffs.get(key, 0)

    def __len__(self):
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_integral(self) -> bool:
        return all(isinstance(v, int) or Fraction(v).denominator == 1 for v in self._coeffs.values())

    def _check(self, other):
        if not isinstance(other, PolyChain) or other.k != self.k or other.complex.n_vertices != self.complex.n_vertices:
            raise ChainError("incompatible polyhedral chains")

    def __add__(self, other: "PolyChain") -> "PolyChain":
        self._check(other)
        acc = dict(self._coeffs)
        for s, v in other._coeffs.items():
            acc[s] = acc.get(s, 0) + v
        c = self.complex if self.complex.simplices >= other.complex.simplices else other.complex
        return PolyChain(c, self.k, acc)

    def __neg__(self):
        return PolyChain(self.complex, self.k, {s: -v for s, v in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n):
        return PolyChain(self.complex, self.k, {s: n * v for s, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, PolyChain) and self.k == other.k
                and self._coeffs == other._coeffs)

    def __hash__(self):
        return hash((self.k, tuple(sorted(self._coeffs.items()))))

    def __repr__(self):
        return f"PolyChain(k={self.k}, terms={dict(self.items())})"

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self._coeffs)

    def boundary(self) -> "PolyChain":
        if self.k < 1:
            raise ChainError("boundary of a 0-chain is not defined here")
        acc: dict = {}
        for s, v in self._coeffs.items():
            for sgn, f in boundary_faces(s):
                acc[f] = acc.get(f, 0) + sgn * v
        return PolyChain(self.complex, self.k - 1, acc)

    def mass(self) -> SqrtSum:
        from .complex import simplex_volume_sq_in

        return sqrt_sum_total(SqrtSum.sqrt(simplex_volume_sq_in(self.complex, s)) * abs(Fraction(v))
                              for s, v in self._coeffs.items())

    def to_pl(self) -> PLChain:
        if not self.is_integral():
            raise ChainError("PL chains carry integer coefficients")
        terms = [(self.complex.geometric(s).vertices, int(v)) for s, v in self._coeffs.items()]
        ambient = self.complex.ambient if self.complex.coords is not None else self.complex.n_vertices
        return PLChain(self.k, ambient, terms)


def transport(sigma: SimplicialComplex, phi0: Sequence[Sequence], p: PolyChain,
              realization: Sequence[Sequence] | None = None) -> tuple[PLChain, PLChain]:
    """Λ(P) = affine extension of the vertex map φ0, Γ(P) = prism from the realization to Λ.

    The realization defaults to the complex's embedded coordinates; it must
    live in the same ambient space as φ0.
    """
    images = tuple(point(x) for x in phi0)
    if len(images) != sigma.n_vertices:
        raise ChainError("φ0 must give one image per vertex")
    real = realization if realization is not None else sigma.coords
    if real is None:
        raise ChainError("an abstract complex needs an explicit realization")
    real = tuple(point(x) for x in real)
    d = len(images[0])
    if len(real[0]) != d:
        raise ChainError("realization and φ0 live in different ambient spaces")
    lam_terms, gam_terms = [], []
    for s, v in p.items():
        if Fraction(v).denominator != 1:
            raise ChainError("transport expects integer coefficients")
        a = [real[i] for i in s]
        b = [images[i] for i in s]
        lam_terms.append((tuple(b), int(v)))
        for i in range(len(s)):
            gam_terms.append((tuple(a[: i + 1]) + tuple(b[i:]), (-1) ** i * int(v)))
    return PLChain(p.k, d, lam_terms), PLChain(p.k + 1, d, gam_terms)


def realization_chain(sigma: SimplicialComplex, p: PolyChain,
                      realization: Sequence[Sequence] | None = None) -> PLChain:
    """h_#P for the realization map h."""
    real = realization if realization is not None else sigma.coords
    real = tuple(point(x) for x in real)
    return PLChain(p.k, len(real[0]), [(tuple(real[i] for i in s), int(v)) for s, v in p.items()])
