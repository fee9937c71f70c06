"""Current-level equality of PL chains.

Two chains are equal as currents when their difference has zero
multiplicity almost everywhere.  The exact mode groups the difference by
oriented affine k-plane, splits every term along the facet hyperplanes of the
terms it overlaps (a common refinement), and reads off the multiplicity on
each cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chain import PLChain, mass
from .exact import Point, det, dot, rref, solve, sub
from .forms import TestForm, evaluate, monomial_basis, random_form
from .geom import Polytope


def plane_of(key: Sequence[Point]) -> tuple[tuple, tuple[int, ...], int]:
    """(canonical plane key, pivot coordinates, orientation sign) of a k-simplex."""
    v0 = key[0]
    edges = [sub(v, v0) for v in key[1:]]
    basis, piv = rref(edges)
    if len(piv) != len(edges):
        raise ValueError("degenerate simplex has no plane")
    base = list(v0)
    for r, c in zip(basis, piv):
        f = v0[c]
        if f:
            base = [b - f * x for b, x in zip(base, r)]
    m = [[e[c] for c in piv] for e in edges]
    d = det(m)
    return (tuple(tuple(r) for r in basis), tuple(base)), tuple(piv), (1 if d > 0 else -1)


def _lift(plane, u: Sequence[Fraction]) -> Point:
    basis, base = plane
    out = list(base)
    for coef, r in zip(u, basis):
        if coef:
            out = [o + coef * x for o, x in zip(out, r)]
    return tuple(out)


def _barycentric_functionals(verts: Sequence[Sequence[Fraction]]) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """λ_i(u) = n_i·u + c_i for a full-dimensional simplex in ℝ^k."""
    k = len(verts) - 1
    # rows: [u, 1] for each vertex; λ = inverse
    mat = [list(v) + [Fraction(1)] for v in verts]  # (k+1)×(k+1), rows vertices
    out = []
    for i in range(k + 1):
        rhs = [Fraction(int(j == i)) for j in range(k + 1)]
        sol = solve(mat, rhs)  # coefficients (n, c) with [v,1]·(n,c) = δ_ij
        out.append((tuple(sol[:k]), sol[k]))
    return out


def _normalize(n: tuple[Fraction, ...], c: Fraction):
    lead = next(x for x in n if x != 0)
    s = 1 / abs(lead) * (1 if lead > 0 else -1)
    return tuple(x * s for x in n), c * s


@dataclass
class _Term:
    verts: tuple  # u-coordinates, positively oriented
    coeff: int
    lo: tuple
    hi: tuple
    facets: list  # normalized (n, c) hyperplanes
    lams: list


def _strict_inside(term: _Term, u) -> int:
    """1 if u is in the open simplex, 0 if outside the closed one, -1 on the boundary."""
    vals = [dot(n, u) + c for n, c in term.lams]
    if all(v > 0 for v in vals):
        return 1
    if any(v < 0 for v in vals):
        return 0
    return -1


@dataclass
class CanonicalChain:
    """Disjoint cells with their multiplicities, grouped by plane."""

    k: int
    ambient: int
    cells: list = field(default_factory=list)  # (ambient simplex points, multiplicity)

    def is_zero(self) -> bool:
        return not self.cells

    def to_chain(self) -> PLChain:
        return PLChain(self.k, self.ambient, self.cells)


def canonicalize(t: PLChain, group=None) -> CanonicalChain:
    """Common refinement of t into cells of constant nonzero multiplicity.

    ``group`` optionally maps a term key to a label such that terms with
    different labels never overlap (for example the open simplex of a complex
    carrying the term); refinement then runs per label.
    """
    if t.k == 0:
        return CanonicalChain(0, t.ambient, [(key, c) for key, c in t.items()])
    groups: dict = {}
    for key, c in t.items():
        plane, piv, sign = plane_of(key)
        verts = [tuple(v[i] for i in piv) for v in key]
        if sign < 0:
            verts[0], verts[1] = verts[1], verts[0]
        label = (plane,) if group is None else (plane, group(key))
        groups.setdefault(label, []).append((tuple(verts), c * sign))
    cells = []
    for label in sorted(groups):
        cells.extend(_refine_plane(label[0], groups[label]))
    return CanonicalChain(t.k, t.ambient, cells)


def _refine_plane(plane, items) -> list:
    terms = []
    for verts, c in items:
        lams = _barycentric_functionals(verts)
        k = len(verts[0])
        lo = tuple(min(v[i] for v in verts) for i in range(k))
        hi = tuple(max(v[i] for v in verts) for i in range(k))
        facets = [_normalize(n, c0) for n, c0 in lams]
        terms.append(_Term(verts, c, lo, hi, facets, lams))
    out = []
    for ti, t in enumerate(terms):
        overlapping = [si for si, s in enumerate(terms) if si != ti and all(
            max(a, b) < min(x, y) for a, b, x, y in zip(t.lo, s.lo, t.hi, s.hi))]
        if not overlapping:
            out.append((tuple(_lift(plane, p) for p in t.verts), t.coeff))
            continue
        earlier = [terms[si] for si in overlapping if si < ti]
        later = [terms[si] for si in overlapping if si > ti]
        own = set(t.facets)
        cells = [Polytope(t.verts)]
        # regions inside an earlier term were emitted with that term, so they are
        # dropped as soon as they appear; later terms only split
        for j, s in enumerate(earlier + later):
            cuts = [tuple(dot(n, b) + c0 for b in t.verts)
                    for (n, c0), h in zip(s.lams, s.facets) if h not in own]
            drop = j < len(earlier)
            nxt = []
            for cell in cells:
                rest = cell
                for vals in cuts:
                    inside, outside = rest.split(vals)
                    if outside is not None:
                        nxt.append(outside)
                    rest = inside
                    if rest is None:
                        break
                if rest is not None and not (drop and _strict_inside(s, rest.interior_point()) == 1):
                    nxt.append(rest)
            cells = nxt
        for cell in cells:
            u = cell.interior_point()
            mult = t.coeff + sum(s.coeff for s in later if _strict_inside(s, u) == 1)
            if mult == 0:
                continue
            for pts, sign in cell.triangulate():
                out.append((tuple(_lift(plane, p) for p in pts), mult * sign))
    return out


@dataclass
class EqualityVerdict:
    equal: bool
    mode: str
    detail: dict
    witness: TestForm | None = None

    def __bool__(self) -> bool:
        return self.equal


def find_witness(d: PLChain, max_degree: int = 2) -> TestForm | None:
    for deg in range(max_degree + 1):
        for w in monomial_basis(d.k, d.ambient, deg):
            if evaluate(d, w) != 0:
                return w
    return None


def chains_equal(t1: PLChain, t2: PLChain, form_budget: int = 8, *, mode: str = "exact",
                 seed: int = 0, max_degree: int = 2) -> EqualityVerdict:
    """Decide T1 = T2 as currents.

    ``exact`` refines the difference and compares multiplicities; ``fast``
    compares integrals against the monomial basis up to ``max_degree`` and
    ``form_budget`` seeded random forms.
    """
    if t1.k != t2.k or t1.ambient != t2.ambient:
        raise ValueError("chains differ in dimension or ambient")
    diff = t1 - t2
    if mode == "exact":
        if diff.is_zero():
            return EqualityVerdict(True, "exact", {"stage": "formal", "residual_cells": 0})
        canon = canonicalize(diff)
        if canon.is_zero():
            return EqualityVerdict(True, "exact", {"stage": "refinement", "residual_cells": 0})
        residual = canon.to_chain()
        return EqualityVerdict(False, "exact", {
            "stage": "refinement",
            "residual_cells": len(canon.cells),
            "residual_mass": float(mass(residual)),
        }, find_witness(residual, max_degree))
    if mode == "fast":
        rng = np.random.default_rng(seed)
        forms = monomial_basis(t1.k, t1.ambient, max_degree)
        forms += [random_form(t1.k, t1.ambient, max_degree + 1, rng) for _ in range(form_budget)]
        for w in forms:
            if evaluate(diff, w) != 0:
                return EqualityVerdict(False, "fast", {"forms_checked": len(forms), "seed": seed}, w)
        return EqualityVerdict(True, "fast", {"forms_checked": len(forms), "seed": seed,
                                              "max_degree": max_degree})
    raise ValueError(f"unknown equality mode {mode!r}")
