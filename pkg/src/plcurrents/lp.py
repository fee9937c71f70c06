"""Exact sparse simplex method with Bland's rule.

Solves  min c·x  subject to  A x = b, x ≥ 0  with rational A and b.  Costs may
be Fractions or :class:`~plcurrents.exact.SqrtSum` values; only their signs
and linear combinations are ever needed, so both work exactly.

A floating-point solve can seed a crash basis.  The exact method then
verifies it (or repairs it with further Bland pivots), so the returned
optimum never depends on floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: dict = field(default_factory=dict)  # column -> Fraction (nonzeros only)
    value: object = Fraction(0)
    pivots: int = 0
    warm_started: bool = False
    basis: list = field(default_factory=list)


class _Tableau:
    def __init__(self, rows: list[dict], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.colmap: dict[int, set[int]] = {}
        for i, r in enumerate(rows):
            for j in r:
                self.colmap.setdefault(j, set()).add(i)
        self.pivots = 0

    def pivot(self, r: int, e: int, obj: dict | None = None, obj_val: list | None = None):
        row = self.rows[r]
        p = row[e]
        if p != 1:
            inv = 1 / p
            for j in row:
                row[j] *= inv
            self.rhs[r] *= inv
        for i in list(self.colmap.get(e, ())):
            if i == r:
                continue
            ri = self.rows[i]
            f = ri[e]
            for j, v in row.items():
                nv = ri.get(j, 0) - f * v
                if nv:
                    if j not in ri:
                        self.colmap.setdefault(j, set()).add(i)
                    ri[j] = nv
                elif j in ri:
                    del ri[j]
                    self.colmap[j].discard(i)
            self.rhs[i] -= f * self.rhs[r]
        if obj is not None:
            f = obj.get(e)
            if f:
                for j, v in row.items():
                    nv = obj.get(j, 0) - f * v
                    if nv:
                        obj[j] = nv
                    elif j in obj:
                        del obj[j]
                obj_val[0] -= f * self.rhs[r]
        self.basis[r] = e
        self.pivots += 1

    def drop_row(self, r: int):
        for j in self.rows[r]:
            self.colmap[j].discard(r)
        last = len(self.rows) - 1
        if r != last:
            # move last row into slot r
            for j in self.rows[last]:
                self.colmap[j].discard(last)
                self.colmap[j].add(r)
            self.rows[r] = self.rows[last]
            self.rhs[r] = self.rhs[last]
            self.basis[r] = self.basis[last]
        self.rows.pop()
        self.rhs.pop()
        self.basis.pop()


def _is_neg(v) -> bool:
    return v < 0


def _run(t: _Tableau, obj: dict, obj_val: list, allowed) -> str:
    """Bland's rule iterations until optimal or unbounded."""
    while True:
        e = None
        for j in sorted(obj):
            if allowed(j) and _is_neg(obj[j]):
                e = j
                break
        if e is None:
            return "optimal"
        best = None
        for i in t.colmap.get(e, ()):
            a = t.rows[i][e]
            if a > 0:
                ratio = t.rhs[i] / a
                key = (ratio, t.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        t.pivot(best[1], e, obj, obj_val)


def _float_hint(cols, b, c, n_rows) -> list[int] | None:
    try:
        from scipy.optimize import linprog
        from scipy.sparse import coo_matrix
    except ImportError:  # pragma: no cover
        return None
    data, ri, ci = [], [], []
    for j, col in enumerate(cols):
        for i, v in col.items():
            data.append(float(v))
            ri.append(i)
            ci.append(j)
    a = coo_matrix((data, (ri, ci)), shape=(n_rows, len(cols))).tocsr()
    res = linprog(np.array([float(x) for x in c]), A_eq=a, b_eq=np.array([float(x) for x in b]),
                  bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return [j for j in np.argsort(-res.x, kind="stable") if res.x[j] > 1e-9]


def solve_lp(cols: Sequence[dict], b: Sequence, c: Sequence, *, warm_start: bool = True) -> LPResult:
    """min c·x s.t. Σ_j x_j·cols[j] = b, x ≥ 0 (cols are sparse {row: value})."""
    n = len(cols)
    m = len(b)
    b = [Fraction(v) for v in b]
    rows: list[dict] = [dict() for _ in range(m)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            if v:
                rows[i][j] = Fraction(v)
    for i in range(m):
        if b[i] < 0:
            rows[i] = {j: -v for j, v in rows[i].items()}
            b[i] = -b[i]
    art = list(range(n, n + m))
    for i in range(m):
        rows[i][n + i] = Fraction(1)
    t = _Tableau(rows, list(b), list(art))
    is_art = lambda j: j >= n

    warmed = False
    hint = _float_hint(cols, b, c, m) if warm_start and n else None
    if hint:
        snapshot = ([dict(r) for r in t.rows], list(t.rhs), list(t.basis))
        for j in hint:
            cand = [i for i in t.colmap.get(j, ()) if is_art(t.basis[i])]
            if not cand:
                continue
            i = max(cand, key=lambda i: (abs(t.rows[i][j]), -i))
            t.pivot(i, j)
        ok = all(t.rhs[i] >= 0 if not is_art(t.basis[i]) else t.rhs[i] == 0 for i in range(len(t.rows)))
        if ok:
            warmed = True
        else:
            t = _Tableau(*snapshot)
    if not warmed:
        obj: dict = {}
        for i, r in enumerate(t.rows):
            for j, v in r.items():
                if not is_art(j):
                    obj[j] = obj.get(j, 0) - v
        obj = {j: v for j, v in obj.items() if v}
        val = [-sum(t.rhs, Fraction(0))]  # the objective row stores −z
        _run(t, obj, val, lambda j: True)
        if val[0] != 0:
            return LPResult("infeasible", pivots=t.pivots)
    # drive remaining artificials out at level zero
    i = 0
    while i < len(t.rows):
        if is_art(t.basis[i]):
            j = next((j for j in sorted(t.rows[i]) if not is_art(j)), None)
            if j is None:
                t.drop_row(i)
                continue
            t.pivot(i, j)
        i += 1
    for i, r in enumerate(t.rows):
        for j in [j for j in r if is_art(j)]:
            del r[j]
            t.colmap[j].discard(i)
    # phase 2
    costs = list(c)
    obj = {}
    for j in range(n):
        if costs[j]:
            obj[j] = costs[j]
    val = [0]
    for i, r in enumerate(t.rows):
        cb = costs[t.basis[i]]
        if cb:
            for j, v in r.items():
                nv = obj.get(j, 0) - cb * v
                if nv:
                    obj[j] = nv
                elif j in obj:
                    del obj[j]
            val[0] = val[0] - cb * t.rhs[i]
    status = _run(t, obj, val, lambda j: not is_art(j))
    if status == "unbounded":
        return LPResult("unbounded", pivots=t.pivots, warm_started=warmed)
    x = {t.basis[i]: t.rhs[i] for i in range(len(t.rows)) if t.rhs[i]}
    value = -val[0] if val[0] else Fraction(0)
    return LPResult("optimal", x, value, t.pivots, warmed, list(t.basis))


@dataclass
class ILPResult:
    status: str
    x: dict = field(default_factory=dict)
    value: object = Fraction(0)
    lp_value: object = Fraction(0)
    nodes: int = 0


def _with_bounds(cols, b, bounds):
    """Append rows x_j ≤ u / x_j ≥ l, each with its own slack column."""
    cols = [dict(col) for col in cols]
    b = list(b)
    for j, kind, val in bounds:
        r = len(b)
        cols[j][r] = 1
        cols.append({r: 1 if kind == "le" else -1})
        b.append(val)
    return cols, b


def solve_ilp(cols: Sequence[dict], b: Sequence, c: Sequence, *, max_nodes: int = 10_000,
              warm_start: bool = True) -> ILPResult:
    """Best-first branch and bound on exact LP relaxations.

    Ties in the node queue break by creation order; the branching variable is
    the smallest fractional index.
    """
    import heapq

    n = len(cols)
    root = solve_lp(cols, b, c, warm_start=warm_start)
    if root.status != "optimal":
        return ILPResult(root.status)
    heap = [(float(root.value), 0, (), root)]
    counter = 1
    best = None
    nodes = 0
    while heap and nodes < max_nodes:
        _, _, bounds, res = heapq.heappop(heap)
        nodes += 1
        if best is not None and res.value >= best.value:
            continue
        frac_j = next((j for j in sorted(res.x) if j < n and res.x[j].denominator != 1), None)
        if frac_j is None:
            x = {j: v for j, v in res.x.items() if j < n}
            best = ILPResult("optimal", x, res.value, root.value, nodes)
            continue
        v = res.x[frac_j]
        fl = v.numerator // v.denominator
        for kind, val in (("le", fl), ("ge", fl + 1)):
            nb = bounds + ((frac_j, kind, val),)
            ccols, bb = _with_bounds(cols, b, nb)
            cc = list(c) + [0] * (len(ccols) - n)
            child = solve_lp(ccols, bb, cc, warm_start=warm_start)
            if child.status != "optimal":
                continue
            if best is not None and child.value >= best.value:
                continue
            heapq.heappush(heap, (float(child.value), counter, nb, child))
            counter += 1
    if best is None:
        return ILPResult("infeasible" if not heap else "node_limit", lp_value=root.value, nodes=nodes)
    best.nodes = nodes
    return best
