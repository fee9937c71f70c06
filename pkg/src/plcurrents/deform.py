"""Deformation of PL chains onto the k-skeleton of a triangulated space.

The pipeline:

1. pre-refine T so every term sits in one closed simplex of X;
2. for m = n, …, k+1 push the part of T inside each open m-simplex σ to ∂σ
   by a PL radial projection from a well-chosen center, recording the
   straight-line prisms;
3. round the multiplicity on each k-simplex to an integer read at a generic
   point.

Every piece is exact, so T = P + R + ∂S is certified by exact refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .chain import PLChain, PolyChain, boundary, mass, prism, pushforward
from .complex import SimplicialComplex, closure
from .equality import EqualityVerdict, canonicalize, chains_equal
from .exact import Point, SqrtSum, affine_combination, barycentric, det, point
from .geom import (
    AffineSimplex,
    Polytope,
    clip_simplex_by_region,
    cone_regions,
    inradius_sq,
    model_distance_sq,
    oriented,
    radial_point,
)


class DeformError(ValueError):
    pass


class CenterHit(DeformError):
    """Every admissible center candidate met the carrier of a chain term."""


class NoMassInSimplex(DeformError):
    pass


class GenericPointOnTermBoundary(DeformError):
    pass


class PreRefinementError(DeformError):
    def __init__(self, msg: str, term_index: int | None = None):
        super().__init__(msg)
        self.term_index = term_index


# ----------------------------------------------------------------------------
# Triangulated spaces and point location

@dataclass
class TriangulatedSpace:
    """An embedded complex with its measured triangulation constants.

    ``D`` is the largest distortion of the affine charts from regular side-ε
    simplices; ``c`` is the largest ratio of 1-skeleton path length to
    Euclidean distance over vertex pairs.
    """

    complex: SimplicialComplex
    D: float
    c: float
    declared: bool = False

    @classmethod
    def from_complex(cls, x: SimplicialComplex, D: float | None = None,
                     c: float | None = None) -> "TriangulatedSpace":
        if x.coords is None:
            raise DeformError("deformation needs an embedded complex")
        return cls(x, measure_distortion(x) if D is None else float(D),
                   measure_quasiconvexity(x) if c is None else float(c),
                   declared=D is not None or c is not None)

    @property
    def n(self) -> int:
        return self.complex.dim

    @property
    def epsilon(self) -> Fraction:
        return self.complex.epsilon


def measure_distortion(x: SimplicialComplex) -> float:
    from scipy.linalg import eigh

    eps = float(x.epsilon)
    worst = 1.0
    for s in x.maximal():
        m = len(s) - 1
        if m == 0:
            continue
        pts = np.array([[float(v) for v in x.coords[i]] for i in s])
        e = pts[1:] - pts[0]
        g = e @ e.T
        model = eps * eps * (np.full((m, m), 0.5) + 0.5 * np.eye(m))
        sq = eigh(g, model, eigvals_only=True)
        lo, hi = math.sqrt(max(sq.min(), 0.0)), math.sqrt(sq.max())
        worst = max(worst, hi, 1 / lo if lo > 0 else math.inf)
    return worst


def measure_quasiconvexity(x: SimplicialComplex) -> float:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import shortest_path

    n = x.n_vertices
    pts = np.array([[float(v) for v in p] for p in x.coords])
    edges = x.of_dim(1)
    if not edges:
        return 1.0
    a, b = np.array(edges).T
    w = np.linalg.norm(pts[a] - pts[b], axis=1)
    g = coo_matrix((w, (a, b)), shape=(n, n)).tocsr()
    dist = shortest_path(g, directed=False)
    eu = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    mask = (eu > 0) & np.isfinite(dist)
    return float((dist[mask] / eu[mask]).max()) if mask.any() else 1.0


class _Locator:
    """Exact carriers of points and terms in an embedded complex."""

    def __init__(self, x: SimplicialComplex):
        self.x = x
        self.tops = x.maximal()
        self.boxes = []
        for s in self.tops:
            pts = [x.coords[v] for v in s]
            self.boxes.append((tuple(min(c) for c in zip(*pts)), tuple(max(c) for c in zip(*pts))))
        self.cache: dict[Point, tuple[int, ...]] = {}

    def candidates(self, lo, hi) -> Iterable[int]:
        for i, (blo, bhi) in enumerate(self.boxes):
            if all(a <= d and c <= b for a, b, c, d in zip(blo, bhi, lo, hi)):
                yield i

    def point_carrier(self, p: Point) -> tuple[int, ...]:
        hit = self.cache.get(p)
        if hit is not None:
            return hit
        for i in self.candidates(p, p):
            s = self.tops[i]
            lam = barycentric(p, [self.x.coords[v] for v in s])
            if lam is not None and all(l >= 0 for l in lam):
                hit = tuple(v for v, l in zip(s, lam) if l > 0)
                self.cache[p] = hit
                return hit
        raise DeformError(f"point {p} lies outside the complex")

    def term_carrier(self, key: Sequence[Point]) -> tuple[int, ...] | None:
        """Smallest simplex containing the term, or None when it straddles."""
        verts = set()
        for p in key:
            verts.update(self.point_carrier(p))
        s = tuple(sorted(verts))
        return s if s in self.x.simplices else None


# ----------------------------------------------------------------------------
# Pre-refinement

def refine_to_complex(x: SimplicialComplex, t: PLChain, loc: _Locator | None = None) -> PLChain:
    """Split every term of t along the simplices of x.

    A piece lying in a face shared by several top simplices is emitted once,
    by the first top simplex (in sorted order) containing that face.
    """
    loc = loc or _Locator(x)
    out: dict = {}

    def emit(key, c):
        for pts, cc in PLChain(t.k, t.ambient, [(key, c)]).items():
            out[pts] = out.get(pts, 0) + cc

    for idx, (key, c) in enumerate(t.items()):
        try:
            car = loc.term_carrier(key)
        except DeformError as exc:
            raise PreRefinementError(f"term {idx}: {exc}", idx) from None
        if car is not None:
            emit(key, c)
            continue
        lo = tuple(min(cs) for cs in zip(*key))
        hi = tuple(max(cs) for cs in zip(*key))
        owner_of: dict = {}
        for ti in loc.candidates(lo, hi):
            s = loc.tops[ti]
            verts = [x.coords[v] for v in s]
            lams = [barycentric(p, verts) for p in key]
            if any(l is None for l in lams):
                continue
            poly: Polytope | None = Polytope(key)
            for i in range(len(s)):
                poly = poly.clip(tuple(l[i] for l in lams))
                if poly is None:
                    break
            if poly is None:
                continue
            inner = barycentric(poly.interior_point(), verts)
            face = tuple(v for v, l in zip(s, inner) if l > 0)
            owner = owner_of.setdefault(face, ti)
            if owner != ti:
                continue
            for pts, sign in poly.triangulate():
                emit(oriented(pts, sign).vertices, c)
        # every covered piece is now emitted; nothing is left when the term leaves |X|
    res = PLChain._from_dict(t.k, t.ambient, out, check_degenerate=False)
    if not chains_equal(res, t, mode="fast", seed=0, max_degree=1):
        raise PreRefinementError("part of the chain lies outside the complex")
    return res


# ----------------------------------------------------------------------------
# Singular integrals and center selection

@lru_cache(maxsize=None)
def _collapsed_rule(k: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes and weights (summing to 1) on a k-simplex, collapsed at vertex 0."""
    if k == 0:
        return np.ones((1, 1)), np.ones(1)
    sub_b, sub_w = _collapsed_rule(k - 1, order)
    x, w = np.polynomial.legendre.leggauss(order)
    u = (x + 1) / 2
    w = w / 2 * k * u ** (k - 1)
    nodes, weights = [], []
    for ui, wi in zip(u, w):
        b = np.zeros((len(sub_b), k + 1))
        b[:, 0] = 1 - ui
        b[:, 1:] = ui * sub_b
        nodes.append(b)
        weights.append(wi * sub_w)
    return np.vstack(nodes), np.concatenate(weights)


def _term_singular_integral(verts: np.ndarray, b: np.ndarray, p: float, order: int) -> float:
    """∫_term |y − b|^p dH^k, by cones from the foot of b on the term's plane."""
    k = len(verts) - 1
    if k == 0:
        return float(np.linalg.norm(verts[0] - b) ** p)
    e = (verts[1:] - verts[0]).T
    g = e.T @ e
    vol = math.sqrt(max(np.linalg.det(g), 0.0)) / math.factorial(k)
    if vol == 0:
        return 0.0
    coef = np.linalg.solve(g, e.T @ (b - verts[0]))
    foot = verts[0] + e @ coef
    lam = np.concatenate([[1 - coef.sum()], coef])
    nodes, weights = _collapsed_rule(k, order)
    total = 0.0
    for i, li in enumerate(lam):
        if abs(li) < 1e-15:
            continue
        piece = np.vstack([foot, np.delete(verts, i, axis=0)])
        pts = nodes @ piece
        d = np.linalg.norm(pts - b, axis=1)
        with np.errstate(divide="ignore"):
            f = d ** p
        total += li * vol * float(weights @ f)
    return total


def singular_integral(mu: PLChain | None, b: Sequence, exponent: float, *, scale: float = 1.0,
                      order: int = 10) -> float:
    """∫ (|y − b|/scale)^exponent d‖μ‖(y)."""
    if mu is None or mu.is_zero():
        return 0.0
    bb = np.array([float(v) for v in b]) / scale
    total = 0.0
    for key, c in mu.items():
        verts = np.array([[float(v) for v in p] for p in key]) / scale
        total += abs(c) * _term_singular_integral(verts, bb, exponent, order) * scale ** (len(key) - 1)
    return total


@dataclass
class CenterChoice:
    point: Point
    bary: tuple
    K1: float
    K2: float
    candidates: int
    rejected: int
    quadrature_order: int
    exponents: tuple
    no_mass: bool = False


def _rational_bary(x: np.ndarray, bits: int = 30) -> tuple[Fraction, ...]:
    d = 1 << bits
    tail = [Fraction(round(float(v) * d), d) for v in x[1:]]
    return (1 - sum(tail),) + tuple(tail)


def _ball_candidate(m: int, rng: np.random.Generator) -> tuple[Fraction, ...] | None:
    """Uniform point of U(o, r_m/2) in barycentric coordinates of the side-1 model."""
    r = math.sqrt(float(inradius_sq(m))) / 2
    z = rng.standard_normal(m + 1)
    z -= z.mean()
    nz = np.linalg.norm(z)
    if nz == 0:
        return None
    rad = r * rng.random() ** (1 / m)
    # model distance is |Δλ|/√2
    lam = np.full(m + 1, 1 / (m + 1)) + z / nz * rad * math.sqrt(2)
    cand = _rational_bary(lam)
    o = tuple(Fraction(1, m + 1) for _ in range(m + 1))
    if model_distance_sq(cand, o) * 4 >= inradius_sq(m):
        return None
    return cand


def select_center(sigma: AffineSimplex, mu1: PLChain | None, mu2: PLChain | None,
                  samples: int = 16, seed: int = 0, *, exponents: tuple | None = None,
                  scale: float = 1.0, order: int = 10, retries: int = 32,
                  avoid: Callable[[Point], bool] | None = None, strict: bool = False) -> CenterChoice:
    """Pick b ∈ σ ∩ U(o, r_m/2) keeping both singular integrals small.

    Achieved K_i = ∫ (|y−b|/scale)^{p_i} dμ_i / μ_i(σ).  The default exponents
    are 1−m for both measures.  ``avoid`` rejects candidates (for example
    those on a term carrier); rejected draws are replaced up to ``retries``
    times before :class:`CenterHit` is raised.
    """
    m = sigma.dim
    if m < 1:
        raise DeformError("centers are chosen in simplices of dimension ≥ 1")
    exps = exponents if exponents is not None else (1 - m, 1 - m)
    w1 = float(mass(mu1)) if mu1 is not None else 0.0
    w2 = float(mass(mu2)) if mu2 is not None else 0.0
    rng = np.random.default_rng(seed)
    if w1 == 0 and w2 == 0:
        if strict:
            raise NoMassInSimplex("both measures vanish on the simplex")
        o = tuple(Fraction(1, m + 1) for _ in range(m + 1))
        p = affine_combination(o, sigma.vertices)
        if avoid is None or not avoid(p):
            return CenterChoice(p, o, 0.0, 0.0, 0, 0, order, tuple(exps), no_mass=True)
    best = None
    accepted = rejected = 0
    while accepted < samples:
        cand = _ball_candidate(m, rng)
        if cand is None:
            continue
        p = affine_combination(cand, sigma.vertices)
        if avoid is not None and avoid(p):
            rejected += 1
            if rejected > retries:
                break
            continue
        accepted += 1
        k1 = singular_integral(mu1, p, exps[0], scale=scale, order=order) / w1 if w1 else 0.0
        k2 = singular_integral(mu2, p, exps[1], scale=scale, order=order) / w2 if w2 else 0.0
        score = max(k1, k2)
        if best is None or score < best[0]:
            best = (score, p, cand, k1, k2)
    if best is None:
        raise CenterHit(f"no admissible center after {rejected} rejected candidates")
    _, p, cand, k1, k2 = best
    return CenterChoice(p, cand, k1, k2, accepted, rejected, order, tuple(exps),
                        no_mass=(w1 == 0 and w2 == 0))


# ----------------------------------------------------------------------------
# Radial projection

def _in_closed_term(p: Point, key: Sequence[Point]) -> bool:
    lam = barycentric(p, key)
    return lam is not None and all(l >= 0 for l in lam)


def radial_map(sigma: AffineSimplex, b: Sequence) -> Callable[[Point], Point]:
    """Vertex map of the PL radial projection from b (identity on ∂σ)."""
    beta = sigma.barycentric(point(b))

    def rho(x: Point) -> Point:
        lam = sigma.barycentric(x)
        if any(l == 0 for l in lam):
            return x
        mu, _ = radial_point(beta, lam)
        return affine_combination(mu, sigma.vertices)

    return rho


def split_by_regions(sigma: AffineSimplex, b: Sequence, t: PLChain) -> PLChain:
    """Refine t along the facet cone regions of σ from b."""
    regions = cone_regions(sigma, b)
    b = point(b)
    out: dict = {}
    for key, c in t.items():
        if _in_closed_term(b, key):
            raise CenterHit(f"center {b} lies on a chain term")
        if t.k == 0:
            out[key] = out.get(key, 0) + c
            continue
        s = AffineSimplex(key)
        for r in regions:
            for piece in clip_simplex_by_region(s, r):
                for pk, pc in PLChain(t.k, t.ambient, [(piece.vertices, c)]).items():
                    out[pk] = out.get(pk, 0) + pc
    return PLChain._from_dict(t.k, t.ambient, out, check_degenerate=False)


def radial_project(sigma: AffineSimplex, b: Sequence, t_inside: PLChain) -> PLChain:
    """PL radial projection of a chain carried in σ onto ∂σ."""
    if t_inside.is_zero():
        return t_inside
    refined = split_by_regions(sigma, b, t_inside)
    return pushforward(radial_map(sigma, b), refined)


# ----------------------------------------------------------------------------
# Results

@dataclass
class LedgerRow:
    """Local masses on the open simplex against the open star of the input."""

    simplex: tuple
    P: tuple = (0.0, 0.0)   # (‖P‖(int σ), ‖T‖(st σ))
    dP: tuple = (0.0, 0.0)  # (‖∂P‖(int σ), ‖∂T‖(st σ))
    S: tuple = (0.0, 0.0)   # (‖S‖(int σ), ε‖T‖(st σ))
    R: tuple = (0.0, 0.0)   # (‖R‖(int σ), ε‖∂T‖(st σ))

    @staticmethod
    def _ratio(pair) -> float:
        a, b = pair
        if a == 0:
            return 0.0
        return a / b if b > 0 else math.inf

    def ratios(self) -> dict:
        return {q: self._ratio(getattr(self, q)) for q in ("P", "dP", "S", "R")}


@dataclass
class StepResult:
    m: int
    P: PLChain
    R: PLChain
    S: PLChain
    centers: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.P, self.R, self.S))


@dataclass
class SnapResult:
    P: PolyChain
    R: PLChain
    points: dict = field(default_factory=dict)
    multiplicities: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.P, self.R))


@dataclass
class DeformationResult:
    P: PolyChain
    R: PLChain
    S: PLChain
    k: int
    ledger: list = field(default_factory=list)
    global_ratios: dict = field(default_factory=dict)
    max_ratios: dict = field(default_factory=dict)
    centers: dict = field(default_factory=dict)
    certificate: EqualityVerdict | None = None
    boundary_check: EqualityVerdict | None = None
    supports: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)
    note: str = ""
    seed: int = 0

    @property
    def exact(self) -> bool:
        return bool(self.certificate) if self.certificate is not None else False


# ----------------------------------------------------------------------------
# Steps

def _carriers(loc: _Locator, t: PLChain) -> list[tuple[tuple, tuple, int]]:
    out = []
    for key, c in t.items():
        car = loc.term_carrier(key)
        if car is None:
            raise PreRefinementError(f"term {key} is not inside a single simplex")
        out.append((key, car, c))
    return out


def _chain_of(k, ambient, items) -> PLChain:
    return PLChain._from_dict(k, ambient, {key: c for key, _, c in items}, check_degenerate=False)


def deform_step(x: TriangulatedSpace, m: int, t: PLChain, *, seed: int = 0, samples: int = 16,
                retries: int = 32, order: int = 10, loc: _Locator | None = None) -> StepResult:
    """Push the part of t inside open m-simplices to their boundaries.

    Returns (P_next, R_inc, S_inc) with t = P_next + R_inc + ∂S_inc.
    """
    k = t.k
    if k >= m:
        raise DeformError("a deformation step needs k < m")
    cx = x.complex
    loc = loc or _Locator(cx)
    zero_k = PLChain.zero(k, t.ambient)
    if t.is_zero():
        return StepResult(m, t, zero_k, PLChain.zero(k + 1, t.ambient))
    groups: dict = {}
    keep = []
    for key, car, c in _carriers(loc, t):
        if len(car) - 1 == m:
            groups.setdefault(car, []).append((key, car, c))
        else:
            keep.append((key, car, c))
    p_next = _chain_of(k, t.ambient, keep)
    r_inc = zero_k
    s_inc = PLChain.zero(k + 1, t.ambient)
    centers = {}
    scale = float(x.epsilon)
    for n_sigma, sigma_idx in enumerate(sorted(groups)):
        sigma = cx.geometric(sigma_idx)
        inside = _chain_of(k, t.ambient, groups[sigma_idx])
        d_inside = boundary(inside) if k >= 1 else None
        mu2 = None
        if d_inside is not None:
            mu2 = PLChain._from_dict(k - 1, t.ambient, {
                key: c for key, c in d_inside.items() if loc.term_carrier(key) == sigma_idx})
        terms = [key for key, _ in inside.items()]
        choice = select_center(
            sigma, inside, mu2, samples=samples, seed=_subseed(seed, m, n_sigma),
            exponents=(-k, 1 - k), scale=scale, order=order, retries=retries,
            avoid=lambda p: any(_in_closed_term(p, key) for key in terms))
        centers[sigma_idx] = choice
        refined = split_by_regions(sigma, choice.point, inside)
        rho = radial_map(sigma, choice.point)
        ident = lambda v: v
        p_next = p_next + pushforward(rho, refined)
        s_inc = s_inc - prism(ident, rho, refined)
        if k >= 1:
            r_inc = r_inc - prism(ident, rho, boundary(refined))
    return StepResult(m, p_next, r_inc, s_inc, centers)


def _subseed(seed: int, *parts: int) -> int:
    return int(np.random.SeedSequence([seed % (1 << 63), *parts]).generate_state(1)[0])


def _orientation_in(sigma: AffineSimplex, key: Sequence[Point]) -> int:
    lams = [sigma.barycentric(p) for p in key]
    rows = [[a - b for a, b in zip(l[1:], lams[0][1:])] for l in lams[1:]]
    d = det(rows) if rows else Fraction(1)
    return 1 if d > 0 else -1


def snap_to_polyhedral(x: TriangulatedSpace, k: int, t: PLChain, *, seed: int = 0,
                       samples: int = 16, retries: int = 32, order: int = 10,
                       loc: _Locator | None = None) -> SnapResult:
    """Round t (carried in the k-skeleton) to Σ z_σ ⟦σ⟧ with z_σ read at a generic point."""
    cx = x.complex
    loc = loc or _Locator(cx)
    coeffs: dict = {}
    points: dict = {}
    groups: dict = {}
    for key, car, c in _carriers(loc, t):
        if len(car) - 1 != k:
            raise DeformError(f"term {key} is not carried by a {k}-simplex")
        groups.setdefault(car, []).append((key, c))
    scale = float(x.epsilon)
    for n_sigma, sigma_idx in enumerate(sorted(groups)):
        items = groups[sigma_idx]
        sigma = cx.geometric(sigma_idx)
        if k == 0:
            z = sum(c for _, c in items)
            points[sigma_idx] = sigma.vertices[0]
        else:
            inside = PLChain(k, t.ambient, items)
            d_inside = boundary(inside)
            mu2 = PLChain._from_dict(k - 1, t.ambient, {
                key: c for key, c in d_inside.items() if loc.term_carrier(key) == sigma_idx})

            def on_term_boundary(p, items=items):
                for key, _ in items:
                    lam = barycentric(p, key)
                    if all(l >= 0 for l in lam) and any(l == 0 for l in lam):
                        return True
                return False

            try:
                choice = select_center(
                    sigma, None, mu2, samples=samples, seed=_subseed(seed, 0, n_sigma),
                    exponents=(1 - k, 1 - k), scale=scale, order=order, retries=retries,
                    avoid=on_term_boundary)
            except CenterHit as exc:
                raise GenericPointOnTermBoundary(str(exc)) from None
            a = choice.point
            points[sigma_idx] = choice
            z = 0
            for key, c in items:
                lam = barycentric(a, key)
                if all(l > 0 for l in lam):
                    z += c * _orientation_in(sigma, key)
        if z:
            coeffs[sigma_idx] = z
    p = PolyChain(cx, k, coeffs)
    r = t - p.to_pl() if coeffs else t
    return SnapResult(p, r, points, coeffs)


# ----------------------------------------------------------------------------
# The full pipeline

def _local_masses(loc: _Locator, t: PLChain) -> dict:
    """mass of terms by carrier simplex (t should be canonical)."""
    out: dict = {}
    for key, c in t.items():
        car = loc.term_carrier(key)
        vol = SqrtSum.sqrt(AffineSimplex(key).volume_sq()) * abs(c)
        out[car] = out.get(car, 0.0) + float(vol)
    return out


def _star_mass(masses: dict, sigma: tuple) -> float:
    s = set(sigma)
    return sum(v for car, v in masses.items() if s <= set(car))


def _canonical(t: PLChain, loc: _Locator | None = None) -> PLChain:
    if t.is_zero():
        return t
    return canonicalize(t, loc.term_carrier if loc is not None else None).to_chain()


def deform(x: TriangulatedSpace | SimplicialComplex, t: PLChain, k: int | None = None, *,
           seed: int = 0, samples: int = 16, retries: int = 32, order: int = 10,
           equality: str = "exact") -> DeformationResult:
    """T = P + R + ∂S with P polyhedral on the k-skeleton, plus the local mass ledger."""
    if isinstance(x, SimplicialComplex):
        x = TriangulatedSpace.from_complex(x)
    k = t.k if k is None else k
    if k != t.k:
        raise DeformError(f"chain has dimension {t.k}, not {k}")
    cx = x.complex
    n = x.n
    amb = t.ambient
    if cx.ambient != amb:
        raise DeformError("chain and complex live in different ambient spaces")
    if k > n:
        return DeformationResult(
            PolyChain(cx, k), PLChain.zero(k, amb), PLChain.zero(k + 1, amb), k,
            note=(f"k={k} exceeds dim X={n}: a {k}-chain carried by X has zero current, "
                  "so the decomposition is the zero triple"),
            certificate=EqualityVerdict(True, "trivial", {"reason": "k > dim X"}), seed=seed)
    loc = _Locator(cx)
    t_ref = refine_to_complex(cx, t, loc)
    current = t_ref
    r_total = PLChain.zero(k, amb)
    s_total = PLChain.zero(k + 1, amb)
    steps, centers = [], {}
    for m in range(n, k, -1):
        step = deform_step(x, m, current, seed=seed, samples=samples, retries=retries,
                           order=order, loc=loc)
        steps.append(step)
        centers.update(step.centers)
        current = step.P
        r_total = r_total + step.R
        s_total = s_total + step.S
    snap = snap_to_polyhedral(x, k, current, seed=seed, samples=samples, retries=retries,
                              order=order, loc=loc)
    centers.update({s: c for s, c in snap.points.items() if isinstance(c, CenterChoice)})
    p = snap.P
    r_total = r_total + snap.R
    res = DeformationResult(p, r_total, s_total, k, centers=centers, steps=steps, seed=seed)
    recomposed = p.to_pl() + r_total + boundary(s_total)
    res.certificate = chains_equal(t, recomposed, mode=equality, seed=seed)
    d_t = _canonical(boundary(t_ref), loc) if k >= 1 else None
    if k >= 1:
        res.boundary_check = chains_equal(p.boundary().to_pl(), boundary(t) - boundary(r_total),
                                          mode=equality, seed=seed)
    _ledger(res, x, loc, t_ref, d_t)
    return res


def _ledger(res: DeformationResult, x: TriangulatedSpace, loc: _Locator, t_ref: PLChain,
            d_t: PLChain | None) -> None:
    cx = x.complex
    eps = float(x.epsilon)
    k = res.k
    t_can = _canonical(t_ref, loc)
    s_can = _canonical(res.S, loc)
    r_can = _canonical(res.R, loc)
    mt = _local_masses(loc, t_can)
    mdt = _local_masses(loc, d_t) if d_t is not None else {}
    ms = _local_masses(loc, s_can)
    mr = _local_masses(loc, r_can)
    mp = {s: float(v) for s, v in ((s, SqrtSum.sqrt(cx.geometric(s).volume_sq()) * abs(c))
                                   for s, c in res.P.items())}
    dp = res.P.boundary() if k >= 1 else None
    mdp = {}
    if dp is not None:
        mdp = {s: float(SqrtSum.sqrt(cx.geometric(s).volume_sq()) * abs(c)) for s, c in dp.items()}
    keys = sorted(set(mp) | set(mdp) | set(ms) | set(mr), key=lambda s: (len(s), s))
    rows = []
    for s in keys:
        rows.append(LedgerRow(
            s,
            P=(mp.get(s, 0.0), _star_mass(mt, s)),
            dP=(mdp.get(s, 0.0), _star_mass(mdt, s)),
            S=(ms.get(s, 0.0), eps * _star_mass(mt, s)),
            R=(mr.get(s, 0.0), eps * _star_mass(mdt, s)),
        ))
    res.ledger = rows
    maxes = {q: 0.0 for q in ("P", "dP", "S", "R")}
    for row in rows:
        for q, v in row.ratios().items():
            maxes[q] = max(maxes[q], v)
    res.max_ratios = maxes
    mass_t = float(mass(t_can))
    mass_dt = float(mass(d_t)) if d_t is not None else 0.0
    g = {
        "mass_T": mass_t,
        "mass_dT": mass_dt,
        "mass_P": float(res.P.mass()),
        "mass_R": float(mass(r_can)),
        "mass_S": float(mass(s_can)),
    }
    g["P/T"] = g["mass_P"] / mass_t if mass_t else (0.0 if g["mass_P"] == 0 else math.inf)
    g["S/(eps T)"] = g["mass_S"] / (eps * mass_t) if mass_t else (0.0 if g["mass_S"] == 0 else math.inf)
    g["R/(eps dT)"] = (g["mass_R"] / (eps * mass_dt) if mass_dt
                       else (0.0 if g["mass_R"] == 0 else math.inf))
    res.global_ratios = g
    hull_t = closure(cx, {loc.term_carrier(key) for key, _ in t_can.items()})
    hull_dt = closure(cx, {loc.term_carrier(key) for key, _ in d_t.items()}) if d_t is not None else set()
    res.supports = {
        "spt P in Hull(spt T)": all(s in hull_t for s in res.P.support()),
        "spt S in Hull(spt T)": all(loc.term_carrier(key) in hull_t for key, _ in s_can.items()),
        "spt R in Hull(spt dT)": all(loc.term_carrier(key) in hull_dt for key, _ in r_can.items()),
        "spt dP in Hull(spt dT)": (all(s in hull_dt for s in dp.support()) if dp is not None else True),
    }
