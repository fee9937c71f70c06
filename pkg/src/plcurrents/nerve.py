"""Nagata covers of finite metric spaces and their nerves.

A cover {B_i} at scale s gives partition weights τ_i(x) = max(s/2 − d(x, B_i), 0)
and the map ψ(x) = τ(x)/τ̄(x) into the nerve Σ.  A representative point in
each B_i gives the vertex map φ0 back into the space; its affine extension is
φ.  Distances are handled exactly: squared distances are rationals and every
decision about τ is made with :class:`~plcurrents.exact.SqrtSum`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complex import SimplicialComplex, vertex_length_distances
from .exact import SqrtSum, frac, squared_distance, sqrt_sum_total


class EmptyCloud(ValueError):
    pass


class CloudError(ValueError):
    pass


class MetricPointCloud:
    """Points in ℝ^d with exact coordinates, or an explicit distance matrix.

    Squared distances are exact rationals in coordinate mode.  In matrix mode
    the entries themselves are exact and squaring keeps them rational.
    """

    def __init__(self, points: Sequence[Sequence] | None = None,
                 distances: Sequence[Sequence] | None = None, *, check: bool = True):
        if (points is None) == (distances is None):
            raise CloudError("give exactly one of points or distances")
        if points is not None:
            self.points = tuple(tuple(frac(v) for v in p) for p in points)
            self.matrix = None
            n = len(self.points)
            if n and len({len(p) for p in self.points}) != 1:
                raise CloudError("points have different dimensions")
            arr = np.array([[float(v) for v in p] for p in self.points]) if n else np.zeros((0, 0))
            self._float = np.linalg.norm(arr[:, None] - arr[None], axis=2) if n else np.zeros((0, 0))
        else:
            self.points = None
            self.matrix = tuple(tuple(frac(v) for v in row) for row in distances)
            n = len(self.matrix)
            if any(len(row) != n for row in self.matrix):
                raise CloudError("distance matrix is not square")
            self._float = np.array([[float(v) for v in row] for row in self.matrix]) if n else np.zeros((0, 0))
            if check:
                self._check_metric()
        self.n = n

    @classmethod
    def from_points(cls, points) -> "MetricPointCloud":
        return cls(points=points)

    @classmethod
    def from_distances(cls, matrix) -> "MetricPointCloud":
        return cls(distances=matrix)

    def _check_metric(self) -> None:
        m = self.matrix
        n = len(m)
        for i in range(n):
            if m[i][i] != 0:
                raise CloudError(f"nonzero diagonal entry at {i}")
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise CloudError(f"asymmetric entries at ({i}, {j})")
                if m[i][j] < 0:
                    raise CloudError(f"negative distance at ({i}, {j})")
        d = self._float
        scale = max(float(d.max()), 1.0) if n else 1.0
        for k in range(n):
            viol = d > d[:, k:k + 1] + d[k:k + 1, :] + 1e-12 * scale
            if viol.any():
                i, j = map(int, np.argwhere(viol)[0])
                if m[i][j] > m[i][k] + m[k][j]:
                    raise CloudError(f"triangle inequality fails for ({i}, {k}, {j})")

    def __len__(self) -> int:
        return self.n

    def sqdist(self, i: int, j: int) -> Fraction:
        if self.points is not None:
            return squared_distance(self.points[i], self.points[j])
        return self.matrix[i][j] ** 2

    def dist_exact(self, i: int, j: int) -> SqrtSum:
        return SqrtSum.sqrt(self.sqdist(i, j))

    def dist(self, i: int, j: int) -> float:
        return float(self._float[i, j])

    @property
    def float_distances(self) -> np.ndarray:
        return self._float

    @property
    def euclidean(self) -> bool:
        return self.points is not None


@dataclass
class NagataCover:
    s: Fraction
    sets: list            # sorted point-index lists
    centers: list         # net point of each set
    n: int                # measured multiplicity − 1
    c: float              # measured max diam(B_i)/s
    multiplicity: int
    strategy: str = "greedy-net"
    owner: list = field(default_factory=list)  # set index of each point

    def __len__(self) -> int:
        return len(self.sets)


def build_cover(cloud: MetricPointCloud, s, strategy: str = "greedy-net") -> NagataCover:
    """Greedy s-net in index order with nearest-net-point cells (ties to the smaller index)."""
    if cloud.n == 0:
        raise EmptyCloud("the cloud has no points")
    if strategy != "greedy-net":
        raise ValueError(f"unknown cover strategy {strategy!r}")
    s = frac(s)
    if s <= 0:
        raise ValueError("scale must be positive")
    s2 = s * s
    net: list[int] = []
    for i in range(cloud.n):
        if all(cloud.sqdist(i, z) > s2 for z in net):
            net.append(i)
    owner = []
    for i in range(cloud.n):
        best = min(net, key=lambda z: (cloud.sqdist(i, z), z))
        owner.append(net.index(best))
    sets = [[] for _ in net]
    for i, o in enumerate(owner):
        sets[o].append(i)
    diam2 = Fraction(0)
    for b in sets:
        for a in range(len(b)):
            for c in range(a + 1, len(b)):
                diam2 = max(diam2, cloud.sqdist(b[a], b[c]))
    cover = NagataCover(s, sets, list(net), 0, math.sqrt(diam2) / float(s), 1, strategy, owner)
    mult = measured_multiplicity(cloud, cover)
    cover.multiplicity = mult
    cover.n = mult - 1
    return cover


def _set_sqdist(cloud: MetricPointCloud, x: int, members: Sequence[int]) -> Fraction:
    """Exact d(x, B)², scanning only members whose float distance is near the minimum."""
    d = cloud.float_distances[x, members]
    lo = float(d.min())
    tol = 1e-9 * max(lo, 1.0)
    return min(cloud.sqdist(x, members[j]) for j in np.nonzero(d <= lo + tol)[0])


def measured_multiplicity(cloud: MetricPointCloud, cover: NagataCover) -> int:
    """max over points x of the number of sets meeting the closed ball B(x, s/2)."""
    r2 = cover.s * cover.s / 4
    rf = float(cover.s) / 2
    best = 0
    for x in range(cloud.n):
        count = 0
        for b in cover.sets:
            if float(cloud.float_distances[x, b].min()) > rf * (1 + 1e-9) + 1e-12:
                continue
            if _set_sqdist(cloud, x, b) <= r2:
                count += 1
        best = max(best, count)
    return best


def tau(cloud: MetricPointCloud, cover: NagataCover, i: int, x: int) -> SqrtSum:
    """τ_i(x) = max(s/2 − d(x, B_i), 0), exact."""
    half = SqrtSum.rational(cover.s / 2)
    if float(cloud.float_distances[x, cover.sets[i]].min()) > float(cover.s) / 2 * (1 + 1e-9) + 1e-12:
        return SqrtSum()
    d2 = _set_sqdist(cloud, x, cover.sets[i])
    if d2 >= cover.s * cover.s / 4:
        return SqrtSum()
    return half - SqrtSum.sqrt(d2)


def tau_vector(cloud: MetricPointCloud, cover: NagataCover, x: int) -> dict[int, SqrtSum]:
    out = {}
    for i in range(len(cover.sets)):
        t = tau(cloud, cover, i, x)
        if t:
            out[i] = t
    return out


def psi(cloud: MetricPointCloud, cover: NagataCover, x: int) -> dict[int, float]:
    """Barycentric coordinates ψ(x) = τ(x)/τ̄(x) (nonzero entries)."""
    taus = tau_vector(cloud, cover, x)
    total = float(sqrt_sum_total(taus.values()))
    return {i: float(t) / total for i, t in sorted(taus.items())}


@dataclass
class Nerve:
    complex: SimplicialComplex
    taus: list          # per point: {set index: SqrtSum}
    psi: list           # per point: {set index: float}
    phi0: list          # per vertex: cloud index of the representative
    cover: NagataCover

    def phi0_points(self, cloud: MetricPointCloud) -> list | None:
        if not cloud.euclidean:
            return None
        return [cloud.points[i] for i in self.phi0]


def _representative(cloud: MetricPointCloud, members: Sequence[int]) -> int:
    # argmin_x Σ_y |x − y|² is the member closest to the centroid
    return min(members, key=lambda x: (sum(cloud.sqdist(x, y) for y in members), x))


def build_nerve(cover: NagataCover, cloud: MetricPointCloud) -> Nerve:
    """Σ has a simplex for every family of sets with simultaneously positive τ."""
    taus, psis, simplices = [], [], set()
    for x in range(cloud.n):
        tv = tau_vector(cloud, cover, x)
        taus.append(tv)
        total = float(sqrt_sum_total(tv.values()))
        psis.append({i: float(t) / total for i, t in sorted(tv.items())})
        simplices.add(tuple(sorted(tv)))
    phi0 = [_representative(cloud, b) for b in cover.sets]
    sigma = SimplicialComplex(frozenset(simplices), len(cover.sets), None, cover.s)
    return Nerve(sigma, taus, psis, phi0, cover)


@dataclass
class StructureReport:
    epsilon: float
    density_defect: float
    quasi_isometry_C: float
    qi_upper: float
    qi_lower: float
    displacement: float | None
    psi_lipschitz: float
    psi_local_bound_ratio: float
    tau_bar_ok: bool
    multiplicity: int
    dim: int
    subdivision_depth: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def verify_structure(nerve: Nerve, cloud: MetricPointCloud, eps=None, *,
                     subdivision_depth: int = 1) -> StructureReport:
    """Measured constants of the polyhedral structure (ψ, Σ, φ).

    * density defect: max_x d(x, φ0(Σ⁽⁰⁾))/ε;
    * the smallest C with d_Σ(z,w) − Cε ≤ d(φz, φw) ≤ C·d_Σ(z,w) over vertex
      pairs, d_Σ being the length metric estimated at ``subdivision_depth``;
    * displacement max_x d(x, φ(ψ(x)))/ε (Euclidean clouds only);
    * ψ Lipschitz constant (ℓ2 on barycentric coordinates) times ε, and the
      largest ratio of |ψx − ψx′|₁ to 4(n+1)·d(x,x′)/τ̄(x).
    """
    cover = nerve.cover
    eps = float(cover.s if eps is None else frac(eps))
    d = cloud.float_distances
    reps = nerve.phi0
    density = float(d[:, reps].min(axis=1).max()) / eps if cloud.n else 0.0
    nv = len(reps)
    if nv > 1:
        dl = vertex_length_distances(nerve.complex, subdivision_depth)
        dphi = d[np.ix_(reps, reps)]
        iu = np.triu_indices(nv, 1)
        a, b = dl[iu], dphi[iu]
        finite = np.isfinite(a)
        upper = float((b[finite] / a[finite]).max()) if finite.any() else 0.0
        lower = float(((a[finite] - b[finite]) / eps).max()) if finite.any() else 0.0
    else:
        upper = lower = 0.0
    qi = max(upper, lower, 0.0)
    displacement = None
    if cloud.euclidean and cloud.n:
        pts = np.array([[float(v) for v in p] for p in cloud.points])
        rp = pts[reps]
        disp = 0.0
        for x, ps in enumerate(nerve.psi):
            img = sum(w * rp[i] for i, w in ps.items())
            disp = max(disp, float(np.linalg.norm(pts[x] - img)))
        displacement = disp / eps
    n = cloud.n
    mat = np.zeros((n, nv))
    for x, ps in enumerate(nerve.psi):
        for i, w in ps.items():
            mat[x, i] = w
    tbar = np.array([float(sqrt_sum_total(t.values())) for t in nerve.taus])
    half = SqrtSum.rational(cover.s / 2)
    tau_ok = all(sqrt_sum_total(t.values()) >= half for t in nerve.taus)
    lip = 0.0
    local = 0.0
    mult = cover.multiplicity
    for x in range(n):
        diff = mat[x + 1:] - mat[x]
        dd = d[x, x + 1:]
        pos = dd > 0
        if not pos.any():
            continue
        l2 = np.linalg.norm(diff[pos], axis=1) / dd[pos]
        lip = max(lip, float(l2.max()))
        l1 = np.abs(diff[pos]).sum(axis=1)
        bound_x = 4 * mult * dd[pos] / tbar[x]
        local = max(local, float((l1 / bound_x).max()))
    return StructureReport(eps, density, qi, upper, lower, displacement, lip * eps, local, tau_ok,
                           mult, nerve.complex.dim, subdivision_depth)


def grid_cloud(n: int = 20) -> MetricPointCloud:
    """n×n grid in the unit square with exact coordinates i/(n−1)."""
    return MetricPointCloud.from_points(
        [(Fraction(i, n - 1), Fraction(j, n - 1)) for j in range(n) for i in range(n)])


def line_cloud(n: int = 11, spacing=1) -> MetricPointCloud:
    return MetricPointCloud.from_points([(frac(spacing) * i,) for i in range(n)])
