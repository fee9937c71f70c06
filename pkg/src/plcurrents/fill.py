"""Filling volume, flat norm, coning and undistortion via exact L1 minimization.

Chains live on a fixed complex.  A filling of the k-cycle t is a (k+1)-chain s
with ∂s = t, and its mass is Σ vol(σ)|s_σ|.  Splitting s = s⁺ − s⁻ turns the
minimization into a linear program, solved exactly by :mod:`plcurrents.lp`.
Volumes may be irrational; the solver only needs their signs and sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .chain import (ChainError, PLChain, PolyChain, _point_simplex_distance_sq, augmentation,
                    boundary, cone, mass, support_diameter_sq, support_radius_sq)
from .complex import SimplicialComplex, boundary_faces, simplex_volume_sq_in
from .exact import SqrtSum, point, squared_distance
from .lp import solve_ilp, solve_lp


class FillError(ValueError):
    pass


class NotACycle(FillError):
    pass


class NotABoundary(FillError):
    """The cycle bounds nothing; ``certificate`` is a cocycle y with y·t ≠ 0 (None for torsion)."""

    def __init__(self, msg: str, certificate: dict | None = None, pairing=None):
        super().__init__(msg)
        self.certificate = certificate
        self.pairing = pairing


class SubcomplexInvalid(FillError):
    pass


@dataclass
class FillingResult:
    S: PolyChain
    value: SqrtSum
    mode: str
    lp_value: SqrtSum
    gap: float
    stats: dict = field(default_factory=dict)

    @property
    def integral(self) -> bool:
        return self.S.is_integral()


def _volume(c: SimplicialComplex, s: tuple[int, ...]) -> SqrtSum:
    return SqrtSum.sqrt(simplex_volume_sq_in(c, s))


def _as_value(v) -> SqrtSum:
    return v if isinstance(v, SqrtSum) else SqrtSum.rational(v)


def is_cycle(t: PolyChain) -> bool:
    if t.k == 0:
        return sum(Fraction(v) for _, v in t.items()) == 0
    return t.boundary().is_zero()


def _solve(cols, b, costs, mode: str):
    if mode == "lp":
        res = solve_lp(cols, b, costs)
        return res.status, res.x, res.value, res.value, {"pivots": res.pivots,
                                                          "warm_started": res.warm_started}
    if mode == "ilp":
        res = solve_ilp(cols, b, costs)
        return res.status, res.x, res.value, res.lp_value, {"nodes": res.nodes}
    raise ValueError(f"unknown mode {mode!r}")


def homology_certificate(c: SimplicialComplex, t: PolyChain,
                         allowed: Iterable[tuple[int, ...]] | None = None) -> dict | None:
    """A rational y on k-simplices with y·∂σ = 0 for every allowed (k+1)-simplex and y·t = 1.

    Returns None when t is a rational boundary.  Found by an exact LP
    feasibility solve over y = y⁺ − y⁻.
    """
    k = t.k
    tops = list(c.of_dim(k + 1)) if allowed is None else sorted(allowed)
    rows = list(c.of_dim(k))
    ridx = {e: i for i, e in enumerate(rows)}
    cols = []
    for e in rows:
        col = {}
        for j, s in enumerate(tops):
            for sgn, f in boundary_faces(s):
                if f == e:
                    col[j] = sgn
        v = t.coeff(e)
        if v:
            col[len(tops)] = v
        cols.append(col)
        cols.append({r: -x for r, x in col.items()})
    b = [0] * len(tops) + [1]
    res = solve_lp(cols, b, [0] * len(cols))
    if res.status != "optimal":
        return None
    y = {}
    for j, v in res.x.items():
        e = rows[j // 2]
        y[e] = y.get(e, 0) + (v if j % 2 == 0 else -v)
    return {e: v for e, v in y.items() if v}


def check_certificate(c: SimplicialComplex, t: PolyChain, y: dict,
                      allowed: Iterable[tuple[int, ...]] | None = None) -> bool:
    tops = c.of_dim(t.k + 1) if allowed is None else allowed
    for s in tops:
        if sum(sgn * y.get(f, 0) for sgn, f in boundary_faces(s)) != 0:
            return False
    return sum(Fraction(v) * y.get(e, 0) for e, v in t.items()) != 0


def fillvol(c: SimplicialComplex, t: PolyChain, mode: str = "lp", *,
            allowed: Iterable[tuple[int, ...]] | None = None) -> FillingResult:
    """Least-mass (k+1)-chain S on c with ∂S = t.

    ``allowed`` restricts S to a set of (k+1)-simplices.  Raises NotACycle,
    or NotABoundary carrying a cocycle certificate.
    """
    if not is_cycle(t):
        raise NotACycle("the chain has nonzero boundary")
    k = t.k
    if any(tuple(s) not in c.simplices for s, _ in t.items()):
        raise FillError("the cycle is not supported in the complex")
    if t.is_zero():
        z = PolyChain(c, k + 1) if k + 1 <= max(c.dim, 0) else None
        return FillingResult(z, SqrtSum(), mode, SqrtSum(), 0.0, {})
    tops = list(c.of_dim(k + 1)) if allowed is None else sorted(tuple(s) for s in allowed)
    rows: dict[tuple[int, ...], int] = {}
    cols, costs = [], []
    for s in tops:
        col = {}
        for sgn, f in boundary_faces(s):
            col[rows.setdefault(f, len(rows))] = sgn
        vol = _volume(c, s)
        cols.append(col)
        cols.append({r: -v for r, v in col.items()})
        costs += [vol, vol]
    for e, v in t.items():
        if e not in rows:
            y = homology_certificate(c, t, tops)
            raise NotABoundary(f"{e} is a face of no allowed simplex", y, 1 if y else None)
    b = [0] * len(rows)
    for e, v in t.items():
        b[rows[e]] = v
    status, x, value, lp_value, stats = _solve(cols, b, costs, mode)
    if status != "optimal":
        y = homology_certificate(c, t, tops)
        msg = "the cycle is not a boundary" if y else "the cycle is a rational but not an integral boundary"
        raise NotABoundary(msg, y, 1 if y else None)
    coeffs: dict = {}
    for j, v in x.items():
        s = tops[j // 2]
        coeffs[s] = coeffs.get(s, 0) + (v if j % 2 == 0 else -v)
    S = PolyChain(c, k + 1, coeffs)
    if S.boundary() != t:
        raise FillError("internal error: the optimal chain does not bound the cycle")
    value, lp_value = _as_value(value), _as_value(lp_value)
    gap = float(value) / float(lp_value) - 1 if lp_value else 0.0
    stats["variables"] = len(cols)
    stats["constraints"] = len(rows)
    return FillingResult(S, value, mode, lp_value, gap, stats)


@dataclass
class FlatNormResult:
    U: PolyChain
    V: PolyChain | None
    value: SqrtSum
    mode: str


def flat_norm(c: SimplicialComplex, t: PolyChain, mode: str = "lp") -> FlatNormResult:
    """min mass(U) + mass(V) over t = U + ∂V."""
    k = t.k
    if t.is_zero():
        return FlatNormResult(t, PolyChain(c, k + 1) if k < c.dim else None, SqrtSum(), mode)
    if k + 1 > c.dim:
        return FlatNormResult(t, None, t.mass(), mode)
    lows = list(c.of_dim(k))
    ridx = {e: i for i, e in enumerate(lows)}
    tops = list(c.of_dim(k + 1))
    cols, costs = [], []
    for e in lows:
        vol = _volume(c, e)
        cols += [{ridx[e]: 1}, {ridx[e]: -1}]
        costs += [vol, vol]
    for s in tops:
        col = {ridx[f]: sgn for sgn, f in boundary_faces(s)}
        vol = _volume(c, s)
        cols += [col, {r: -v for r, v in col.items()}]
        costs += [vol, vol]
    b = [0] * len(lows)
    for e, v in t.items():
        b[ridx[e]] = v
    status, x, value, _, _ = _solve(cols, b, costs, mode)
    if status != "optimal":  # pragma: no cover - U = t is always feasible
        raise FillError(f"flat norm solve ended {status}")
    u, v_ = {}, {}
    nl = 2 * len(lows)
    for j, val in x.items():
        sgn = 1 if j % 2 == 0 else -1
        if j < nl:
            e = lows[j // 2]
            u[e] = u.get(e, 0) + sgn * val
        else:
            s = tops[(j - nl) // 2]
            v_[s] = v_.get(s, 0) + sgn * val
    U, V = PolyChain(c, k, u), PolyChain(c, k + 1, v_)
    if U + V.boundary() != t:
        raise FillError("internal error: decomposition does not reproduce the chain")
    return FlatNormResult(U, V, _as_value(value), mode)


@dataclass
class ConeFilling:
    S: PLChain
    mass: SqrtSum
    bound: SqrtSum
    diameter_bound: SqrtSum | None


def _point_in_support(a, t: PLChain) -> bool:
    return any(_point_simplex_distance_sq(a, key) == 0 for key, _ in t.items())


def cone_fill(t: PLChain, apex: Sequence) -> ConeFilling:
    """S = cone(a, T) with mass(S) ≤ sup_{x∈spt T}|x − a|·mass(T)."""
    a = point(apex)
    if t.k == 0:
        if augmentation(t) != 0:
            raise NotACycle("0-chain with nonzero augmentation")
    elif not boundary(t).is_zero():
        raise NotACycle("the chain has nonzero boundary")
    s = cone(a, t)
    mt = mass(t)
    bound = SqrtSum.sqrt(support_radius_sq(t, a)) * mt
    diam = SqrtSum.sqrt(support_diameter_sq(t)) * mt if _point_in_support(a, t) else None
    return ConeFilling(s, mass(s), bound, diam)


# ----------------------------------------------------------------------------
# Profiles

def _vertex_distance_to_support(c: SimplicialComplex, t: PLChain) -> list[float]:
    keys = [key for key, _ in t.items()]
    return [math.sqrt(min(_point_simplex_distance_sq(p, key) for key in keys)) for p in c.coords]


def _diameter(c: SimplicialComplex, simplices: Iterable[tuple[int, ...]]) -> float:
    verts = sorted({v for s in simplices for v in s})
    best = Fraction(0)
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            best = max(best, squared_distance(c.coords[a], c.coords[b]))
    return math.sqrt(best)


@dataclass
class ProfileRow:
    mass: SqrtSum
    fillvol: SqrtSum
    ei_ratio: float
    ci_ratio: float
    rho_ratio: float | None
    filling_diameter_ratio: float | None
    lp_value: SqrtSum
    integral: bool


def localized_fillvol(c: SimplicialComplex, t: PolyChain, mode: str = "lp", max_doublings: int = 12):
    """Fill inside B(spt T, ρ), doubling ρ from diam(spt T) until feasible.

    A simplex counts as inside when all its vertices are.  Returns
    (FillingResult, ρ, diam(spt T)).
    """
    pl = t.to_pl() if t.is_integral() else None
    if pl is None:
        raise FillError("localized filling needs an integral cycle")
    diam = math.sqrt(support_diameter_sq(pl))
    dist = _vertex_distance_to_support(c, pl)
    rho = diam if diam > 0 else 1.0
    last = None
    for _ in range(max_doublings):
        allowed = [s for s in c.of_dim(t.k + 1) if all(dist[v] <= rho * (1 + 1e-12) for v in s)]
        try:
            return fillvol(c, t, mode, allowed=allowed), rho, diam
        except NotABoundary as e:
            last = e
        rho *= 2
    raise last


def isoperimetric_profile(c: SimplicialComplex, k: int, cycles: Sequence[PolyChain],
                          mode: str = "lp") -> list[ProfileRow]:
    rows = []
    for t in cycles:
        if t.k != k:
            raise FillError(f"expected {k}-cycles")
        if not is_cycle(t):
            raise NotACycle("profile family members must be cycles")
        if t.is_zero():
            continue
        res = fillvol(c, t, mode)
        m = t.mass()
        mf, fv = float(m), float(res.value)
        diam = _diameter(c, [s for s, _ in t.items()])
        ei = fv / mf ** ((k + 1) / k) if k > 0 else math.nan
        ci = fv / (diam * mf) if diam > 0 else math.nan
        rho_ratio = fd_ratio = None
        if t.is_integral():
            loc, rho, d = localized_fillvol(c, t, mode)
            rho_ratio = rho / d if d > 0 else None
            fd_ratio = _diameter(c, loc.S.support()) / d if d > 0 else None
        rows.append(ProfileRow(m, res.value, ei, ci, rho_ratio, fd_ratio, res.lp_value, res.integral))
    return rows


# ----------------------------------------------------------------------------
# Undistortion

@dataclass
class UndistortionRow:
    cycle: PolyChain
    fill_x: SqrtSum | None
    fill_y: SqrtSum | None
    ratio: float
    flag: str | None = None
    certificate: dict | None = None


@dataclass
class UndistortionReport:
    rows: list
    max_ratio: float
    obstructed: list
    exact_ratios: list

    @property
    def infinite(self) -> bool:
        return bool(self.obstructed)


def undistortion_report(y: SimplicialComplex, x: SimplicialComplex, cycles: Sequence[PolyChain],
                        mode: str = "lp") -> UndistortionReport:
    """Fillvol_X(T)/Fillvol_Y(T) per cycle; rows bounding in Y but not in X are flagged."""
    if x.n_vertices != y.n_vertices or not x.simplices <= y.simplices:
        raise SubcomplexInvalid("X is not a subcomplex of Y")
    if x.coords != y.coords:
        raise SubcomplexInvalid("X and Y carry different coordinates")
    rows, obstructed, exact = [], [], []
    for i, t in enumerate(cycles):
        if any(s not in x.simplices for s, _ in t.items()):
            rows.append(UndistortionRow(t, None, None, math.nan, "not supported in X"))
            obstructed.append(i)
            continue
        tx = PolyChain(x, t.k, dict(t.items()))
        ty = PolyChain(y, t.k, dict(t.items()))
        try:
            fy = fillvol(y, ty, mode).value
        except NotABoundary as e:
            rows.append(UndistortionRow(t, None, None, math.nan, "not a boundary in Y", e.certificate))
            obstructed.append(i)
            continue
        try:
            fx = fillvol(x, tx, mode).value
        except NotABoundary as e:
            rows.append(UndistortionRow(t, None, fy, math.inf, "bounds in Y but not in X", e.certificate))
            obstructed.append(i)
            continue
        if fy:
            ratio = float(fx) / float(fy)
            exact.append((fx, fy))
        else:
            ratio = 1.0 if not fx else math.inf
        rows.append(UndistortionRow(t, fx, fy, ratio))
    finite = [r.ratio for r in rows if r.flag is None]
    return UndistortionReport(rows, max(finite, default=math.nan), obstructed, exact)


# ----------------------------------------------------------------------------
# Cycles on grids

def grid_loop(c: SimplicialComplex, corners: Sequence[tuple[int, int]], nx: int) -> PolyChain:
    """Boundary of the axis-parallel rectangle [i0,i1]×[j0,j1] on grid_complex(nx, ·), counterclockwise."""
    (i0, j0), (i1, j1) = corners
    vid = lambda i, j: j * (nx + 1) + i
    path = ([(i, j0) for i in range(i0, i1)] + [(i1, j) for j in range(j0, j1)]
            + [(i, j1) for i in range(i1, i0, -1)] + [(i0, j) for j in range(j1, j0, -1)])
    path.append(path[0])
    coeffs: dict = {}
    for p, q in zip(path, path[1:]):
        e = (vid(*p), vid(*q))
        coeffs[e] = coeffs.get(e, 0) + 1
    return PolyChain(c, 1, list(coeffs.items()))


def edge_path(c: SimplicialComplex, vertices: Sequence[int]) -> PolyChain:
    """The 1-chain along consecutive vertices (which must span edges)."""
    terms = [((a, b), 1) for a, b in zip(vertices, vertices[1:])]
    return PolyChain(c, 1, terms)
