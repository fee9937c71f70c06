"""Finite simplicial complexes with a Euclidean realization."""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import Point, affine_combination, barycentric, frac, point
from .geom import AffineSimplex


class ComplexError(ValueError):
    pass


class DimensionOutOfRange(ComplexError):
    pass


class NotASimplex(ComplexError):
    pass


class DisconnectedComponents(ComplexError):
    """Raised only on request; length_distance itself returns +inf."""


def faces_of(s: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


def boundary_faces(s: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
    """(sign, face) pairs of the alternating face sum."""
    if len(s) == 1:
        return []
    return [((-1) ** i, s[:i] + s[i + 1:]) for i in range(len(s))]


@dataclass(frozen=True)
class SimplicialComplex:
    """A face-closed set of sorted vertex tuples, optionally embedded in ℝ^d.

    ``epsilon`` is the side length of the abstract regular realization.  When
    ``coords`` is None the complex is abstract and geometry goes through
    :func:`realize_l2`.
    """

    simplices: frozenset
    n_vertices: int
    coords: tuple | None = None
    epsilon: Fraction = Fraction(1)
    metric_mode: str = "l2"
    _by_dim: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        closed = set()
        for s in self.simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s) or not s:
                raise ComplexError(f"invalid simplex {s}")
            closed.update(faces_of(s))
        if closed and max(max(s) for s in closed) >= self.n_vertices:
            raise ComplexError("simplex references an unknown vertex")
        object.__setattr__(self, "simplices", frozenset(closed))
        object.__setattr__(self, "epsilon", frac(self.epsilon))
        if self.epsilon <= 0:
            raise ComplexError("epsilon must be positive")
        if self.coords is not None:
            cs = tuple(point(c) for c in self.coords)
            if len(cs) != self.n_vertices:
                raise ComplexError("coordinate count does not match vertex count")
            object.__setattr__(self, "coords", cs)
        if self.metric_mode not in ("l2", "length"):
            raise ComplexError("metric_mode must be 'l2' or 'length'")
        by_dim: dict[int, list] = {}
        for s in closed:
            by_dim.setdefault(len(s) - 1, []).append(s)
        for k in by_dim:
            by_dim[k].sort()
        object.__setattr__(self, "_by_dim", by_dim)

    @classmethod
    def from_maximal(cls, maximal: Iterable[Sequence[int]], coords=None, epsilon=1,
                     n_vertices: int | None = None, metric_mode: str = "l2"):
        maximal = [tuple(sorted(s)) for s in maximal]
        if n_vertices is None:
            if coords is not None:
                n_vertices = len(coords)
            else:
                n_vertices = 1 + max((max(s) for s in maximal), default=-1)
        return cls(frozenset(maximal), n_vertices, coords, frac(epsilon), metric_mode)

    @property
    def dim(self) -> int:
        dims = [k for k in self._by_dim if isinstance(k, int)]
        return max(dims) if dims else -1

    @property
    def ambient(self) -> int | None:
        return len(self.coords[0]) if self.coords else None

    def of_dim(self, k: int) -> list[tuple[int, ...]]:
        return self._by_dim.get(k, [])

    def index(self, k: int) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.of_dim(k))}

    def maximal(self) -> list[tuple[int, ...]]:
        cached = self._by_dim.get("maximal")
        if cached is None:
            covered = set()
            for k, ss in self._by_dim.items():
                if isinstance(k, int) and k > 0:
                    for s in ss:
                        covered.update(f for _, f in boundary_faces(s))
            cached = sorted(s for s in self.simplices if s not in covered)
            self._by_dim["maximal"] = cached
        return list(cached)

    def __contains__(self, s) -> bool:
        return tuple(sorted(s)) in self.simplices

    def geometric(self, s: Sequence[int]) -> AffineSimplex:
        """The affine simplex realizing s (embedded coordinates or the ℓ2 model)."""
        if self.coords is not None:
            return AffineSimplex(tuple(self.coords[v] for v in s))
        pts = realize_l2(self)
        return AffineSimplex(tuple(pts[v] for v in s))

    def subcomplex(self, simplices: Iterable[Sequence[int]]) -> "SimplicialComplex":
        return SimplicialComplex(frozenset(tuple(sorted(s)) for s in simplices),
                                 self.n_vertices, self.coords, self.epsilon, self.metric_mode)

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.n_vertices == other.n_vertices and self.simplices <= other.simplices


@dataclass(frozen=True)
class OrientedSimplexRef:
    simplex: tuple
    sign: int = 1


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse ∂_k: columns indexed by k-simplices, rows by (k−1)-simplices."""

    rows: tuple
    cols: tuple
    columns: tuple  # one {row index: ±1} dict per column

    def dense(self) -> list[list[int]]:
        m = [[0] * len(self.cols) for _ in self.rows]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                m[i][j] = v
        return m

    def apply(self, x: Sequence) -> list:
        out = [0] * len(self.rows)
        for j, col in enumerate(self.columns):
            if x[j]:
                for i, v in col.items():
                    out[i] += v * x[j]
        return out


def boundary_matrix(c: SimplicialComplex, k: int) -> BoundaryMatrix:
    if k < 1 or k > c.dim:
        raise DimensionOutOfRange(f"k={k} outside 1..{c.dim}")
    rows = c.of_dim(k - 1)
    ridx = c.index(k - 1)
    cols = c.of_dim(k)
    columns = tuple({ridx[f]: sgn for sgn, f in boundary_faces(s)} for s in cols)
    return BoundaryMatrix(tuple(rows), tuple(cols), columns)


def star(c: SimplicialComplex, s: Sequence[int]) -> set[tuple[int, ...]]:
    """Simplices whose open interiors make up the open star of s."""
    s = tuple(sorted(s))
    if s not in c.simplices:
        raise NotASimplex(s)
    ss = set(s)
    return {t for t in c.simplices if ss <= set(t)}


def closure(c: SimplicialComplex, simplices: Iterable[Sequence[int]]) -> set[tuple[int, ...]]:
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        if s not in c.simplices:
            raise NotASimplex(s)
        out.update(faces_of(s))
    return out


def carrier(c: SimplicialComplex, x: Sequence) -> tuple[int, ...]:
    """The simplex whose open interior contains the point x."""
    if c.coords is None:
        raise ComplexError("carrier needs embedded coordinates")
    x = point(x)
    for s in c.maximal():
        lam = barycentric(x, [c.coords[v] for v in s])
        if lam is not None and all(l >= 0 for l in lam):
            return tuple(v for v, l in zip(s, lam) if l > 0)
    raise ComplexError(f"point {x} is not in the complex")


def hull(c: SimplicialComplex, simplices: Iterable[Sequence[int]] = (),
         points: Iterable[Sequence] = ()) -> SimplicialComplex:
    """Smallest subcomplex whose closed simplices cover the given simplices/points."""
    carriers = [tuple(sorted(s)) for s in simplices]
    carriers += [carrier(c, x) for x in points]
    return c.subcomplex(closure(c, carriers))


def skeleton(c: SimplicialComplex, k: int) -> SimplicialComplex:
    return c.subcomplex(s for s in c.simplices if len(s) - 1 <= k)


def realize_l2(c: SimplicialComplex) -> tuple[Point, ...]:
    """Vertex i ↦ ε·e_i in ℝ^{#vertices}.

    Edges of this embedding have Euclidean length ε·√2; the metric of the
    complex is the embedding metric scaled by 2^{-1/2}, which makes every
    simplex regular of side ε.  See :func:`l2_distance`.
    """
    n = c.n_vertices
    eps = c.epsilon
    return tuple(tuple(eps if j == i else Fraction(0) for j in range(n)) for i in range(n))


# ----------------------------------------------------------------------------
# Metrics on the abstract realization

BaryPoint = tuple  # sorted ((vertex, weight), ...) with positive weights


def bary(weights: dict[int, Fraction] | int) -> BaryPoint:
    if isinstance(weights, int):
        return ((weights, Fraction(1)),)
    if isinstance(weights, tuple):
        weights = dict(weights)
    items = tuple(sorted((int(v), frac(w)) for v, w in weights.items() if frac(w) != 0))
    total = sum(w for _, w in items)
    if total != 1 or any(w < 0 for _, w in items):
        raise ComplexError("barycentric weights must be nonnegative and sum to 1")
    return items


def l2_distance(c: SimplicialComplex, x, y) -> float:
    """ℓ2 distance between barycentric points of the side-ε realization."""
    dx, dy = dict(bary(x)), dict(bary(y))
    keys = set(dx) | set(dy)
    sq = sum((dx.get(k, 0) - dy.get(k, 0)) ** 2 for k in keys)
    return float(c.epsilon) * math.sqrt(float(sq) / 2)


def _support_in_simplex(c: SimplicialComplex, p: BaryPoint) -> bool:
    return tuple(v for v, _ in p) in c.simplices


def _mid(points: Sequence[BaryPoint]) -> BaryPoint:
    acc: dict[int, Fraction] = {}
    w = Fraction(1, len(points))
    for p in points:
        for v, a in p:
            acc[v] = acc.get(v, Fraction(0)) + w * a
    return tuple(sorted(acc.items()))


def subdivided_simplices(c: SimplicialComplex, depth: int) -> list[tuple[BaryPoint, ...]]:
    """Top simplices of the depth-fold barycentric subdivision of each maximal simplex."""
    current = [tuple(((v, Fraction(1)),) for v in s) for s in c.maximal()]
    for _ in range(depth):
        nxt = []
        for simplex in current:
            k = len(simplex)
            for perm in itertools.permutations(range(k)):
                nxt.append(tuple(_mid([simplex[i] for i in perm[: j + 1]]) for j in range(k)))
        current = nxt
    return current


def _contains(simplex: Sequence[BaryPoint], p: BaryPoint) -> bool:
    verts = sorted({v for q in simplex for v, _ in q} | {v for v, _ in p})
    pos = {v: i for i, v in enumerate(verts)}

    def vec(q):
        out = [Fraction(0)] * len(verts)
        for v, a in q:
            out[pos[v]] = a
        return tuple(out)

    lam = barycentric(vec(p), [vec(q) for q in simplex])
    return lam is not None and all(l >= 0 for l in lam)


def length_distance(c: SimplicialComplex, x, y, subdivision_depth: int = 2) -> float:
    """Graph geodesic on the subdivided 1-skeleton, with x and y attached.

    An upper bound for the length metric that is nonincreasing in the depth;
    returns math.inf when x and y lie in different components.
    """
    px, py = bary(x), bary(y)
    for p in (px, py):
        if not _support_in_simplex(c, p):
            raise ComplexError(f"point {p} is not in the complex")
    if px == py:
        return 0.0
    if tuple(sorted({v for v, _ in px} | {v for v, _ in py})) in c.simplices:
        return l2_distance(c, px, py)
    adj: dict[BaryPoint, set[BaryPoint]] = {}

    def link(a, b):
        if a != b:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)

    simplices = subdivided_simplices(c, subdivision_depth)
    for simplex in simplices:
        for a, b in itertools.combinations(simplex, 2):
            link(a, b)
        for p in (px, py):
            if p not in adj and _contains(simplex, p):
                for q in simplex:
                    link(p, q)
    for p in (px, py):
        if p not in adj:
            for simplex in simplices:
                if _contains(simplex, p):
                    for q in simplex:
                        link(p, q)
    # Dijkstra
    dist = {px: 0.0}
    heap = [(0.0, px)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == py:
            return d
        done.add(u)
        for w in adj.get(u, ()):
            nd = d + l2_distance(c, u, w)
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return math.inf


def vertex_length_distances(c: SimplicialComplex, subdivision_depth: int = 1):
    """All-pairs length-distance estimates between vertices, as a numpy array.

    Same graph as :func:`length_distance`; disconnected pairs get +inf.
    """
    import numpy as np
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import dijkstra

    ids: dict[BaryPoint, int] = {bary(v): v for v in range(c.n_vertices)}
    rows, cols, wts = [], [], []
    seen = set()
    for simplex in subdivided_simplices(c, subdivision_depth):
        for a, b in itertools.combinations(simplex, 2):
            for p in (a, b):
                if p not in ids:
                    ids[p] = len(ids)
            key = (min(ids[a], ids[b]), max(ids[a], ids[b]))
            if key in seen:
                continue
            seen.add(key)
            rows.append(key[0])
            cols.append(key[1])
            wts.append(l2_distance(c, a, b))
    n = len(ids)
    g = coo_matrix((wts, (rows, cols)), shape=(n, n)).tocsr()
    d = dijkstra(g, directed=False, indices=list(range(c.n_vertices)))
    return d[:, : c.n_vertices]


# ----------------------------------------------------------------------------
# Standard triangulated grids

def grid_complex(nx: int, ny: int, h=1, origin=(0, 0)) -> SimplicialComplex:
    """[0,nx·h]×[0,ny·h] with every square cut along its rising diagonal."""
    h = frac(h)
    ox, oy = (frac(v) for v in origin)
    vid = lambda i, j: j * (nx + 1) + i
    coords = [(ox + i * h, oy + j * h) for j in range(ny + 1) for i in range(nx + 1)]
    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b, cc, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, cc))
            tris.append((a, cc, d))
    return SimplicialComplex.from_maximal(tris, coords, epsilon=h)


def cube_grid_complex(nx: int, ny: int, nz: int, h=1) -> SimplicialComplex:
    """Box of unit cubes, each split into six tetrahedra around its main diagonal."""
    h = frac(h)
    vid = lambda i, j, k: (k * (ny + 1) + j) * (nx + 1) + i
    coords = [(i * h, j * h, k * h)
              for k in range(nz + 1) for j in range(ny + 1) for i in range(nx + 1)]
    steps = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    tets = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                for perm in itertools.permutations(range(3)):
                    cur = [i, j, k]
                    verts = [vid(*cur)]
                    for axis in perm:
                        cur = [a + b for a, b in zip(cur, steps[axis])]
                        verts.append(vid(*cur))
                    tets.append(tuple(verts))
    return SimplicialComplex.from_maximal(tets, coords, epsilon=h)


def simplex_volume_sq_in(c: SimplicialComplex, s: Sequence[int]) -> Fraction:
    """Squared volume of s in the metric of c.

    For an abstract complex this undoes the √2 stretch of :func:`realize_l2`,
    so every k-simplex has the volume of the regular side-ε simplex.
    """
    v = c.geometric(s).volume_sq()
    return v if c.coords is not None else v / 2 ** (len(s) - 1)


def boundary_subcomplex(c: SimplicialComplex) -> SimplicialComplex:
    """Faces of codimension one lying in exactly one top simplex, with their faces."""
    n = c.dim
    count: dict[tuple[int, ...], int] = {}
    for s in c.of_dim(n):
        for _, f in boundary_faces(s):
            count[f] = count.get(f, 0) + 1
    return c.subcomplex(closure(c, [f for f, m in count.items() if m == 1]))


def geometric_point(c: SimplicialComplex, p: BaryPoint) -> Point:
    """Realized coordinates of a barycentric point."""
    pts = c.coords if c.coords is not None else realize_l2(c)
    return affine_combination([w for _, w in p], [pts[v] for v, _ in p])
