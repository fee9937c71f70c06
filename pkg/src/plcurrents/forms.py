"""Polynomial differential forms and their exact integrals over PL chains."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping

import numpy as np

from .chain import PLChain
from .exact import det

Poly = dict  # {exponent tuple: Fraction}


class DegreeMismatch(ValueError):
    pass


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for a, x in p.items():
        for b, y in q.items():
            e = tuple(i + j for i, j in zip(a, b))
            out[e] = out.get(e, 0) + x * y
    return {e: v for e, v in out.items() if v}


def _poly_derivative(p: Poly, j: int) -> Poly:
    out: Poly = {}
    for e, v in p.items():
        if e[j]:
            f = list(e)
            f[j] -= 1
            out[tuple(f)] = out.get(tuple(f), 0) + v * e[j]
    return {e: v for e, v in out.items() if v}


@dataclass(frozen=True)
class TestForm:
    """Σ_I p_I(x) dx_I on ℝ^d; ``terms`` maps sorted index tuples I to polynomials."""

    __test__ = False  # not a pytest class

    degree: int
    ambient: int
    terms: tuple  # ((I, ((exponents, coeff), ...)), ...)

    @classmethod
    def make(cls, degree: int, ambient: int, terms: Mapping) -> "TestForm":
        norm = []
        for idx, poly in terms.items():
            idx = tuple(idx)
            if len(idx) != degree or any(i < 0 or i >= ambient for i in idx):
                raise DegreeMismatch(f"index tuple {idx} does not fit degree {degree}")
            sign = 1
            if len(set(idx)) != len(idx):
                continue
            order = sorted(range(len(idx)), key=lambda r: idx[r])
            for i in range(len(order)):
                for j in range(i + 1, len(order)):
                    if order[j] < order[i]:
                        sign = -sign
            items = tuple(sorted((tuple(e), Fraction(v) * sign) for e, v in poly.items() if v))
            if items:
                norm.append((tuple(sorted(idx)), items))
        merged: dict = {}
        for idx, items in norm:
            acc = merged.setdefault(idx, {})
            for e, v in items:
                acc[e] = acc.get(e, 0) + v
        out = tuple(sorted((idx, tuple(sorted((e, v) for e, v in p.items() if v)))
                           for idx, p in merged.items()))
        return cls(degree, ambient, tuple((i, p) for i, p in out if p))

    def polys(self):
        return [(idx, dict(p)) for idx, p in self.terms]

    def d(self) -> "TestForm":
        """Exterior derivative."""
        acc: dict = {}
        for idx, p in self.polys():
            for j in range(self.ambient):
                if j in idx:
                    continue
                dp = _poly_derivative(p, j)
                if not dp:
                    continue
                sign = (-1) ** sum(1 for i in idx if i < j)
                new = tuple(sorted(idx + (j,)))
                tgt = acc.setdefault(new, {})
                for e, v in dp.items():
                    tgt[e] = tgt.get(e, 0) + sign * v
        return TestForm.make(self.degree + 1, self.ambient, acc)

    def to_text(self) -> str:
        parts = []
        for idx, p in self.terms:
            mono = " + ".join(f"{v}*x^{list(e)}" for e, v in p)
            parts.append(f"({mono}) d{list(idx)}")
        return " + ".join(parts) if parts else "0"


def monomial_form(ambient: int, idx, exponents, coeff=1) -> TestForm:
    return TestForm.make(len(idx), ambient, {tuple(idx): {tuple(exponents): Fraction(coeff)}})


def monomial_basis(degree: int, ambient: int, max_poly_degree: int) -> list[TestForm]:
    out = []
    exps = [e for e in itertools.product(range(max_poly_degree + 1), repeat=ambient)
            if sum(e) <= max_poly_degree]
    for idx in itertools.combinations(range(ambient), degree):
        for e in sorted(exps, key=lambda e: (sum(e), e)):
            out.append(monomial_form(ambient, idx, e))
    return out


def random_form(degree: int, ambient: int, max_poly_degree: int, rng: np.random.Generator,
                n_monomials: int = 4) -> TestForm:
    exps = [e for e in itertools.product(range(max_poly_degree + 1), repeat=ambient)
            if sum(e) <= max_poly_degree]
    idxs = list(itertools.combinations(range(ambient), degree))
    terms: dict = {}
    for idx in idxs:
        poly = {}
        for _ in range(n_monomials):
            e = exps[int(rng.integers(len(exps)))]
            poly[e] = poly.get(e, 0) + Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 8)))
        terms[idx] = poly
    return TestForm.make(degree, ambient, terms)


def _simplex_moment(alpha) -> Fraction:
    """∫ over the standard k-simplex of t^α."""
    k = len(alpha)
    num = 1
    for a in alpha:
        num *= factorial(a)
    return Fraction(num, factorial(k + sum(alpha)))


def _integrate_over_simplex(verts, p: Poly) -> Fraction:
    """∫_{Δ_k} p(v0 + E t) dt with E the edge matrix."""
    v0 = verts[0]
    k = len(verts) - 1
    d = len(v0)
    # coordinate i as a polynomial in t
    lin = []
    for i in range(d):
        q: Poly = {}
        if v0[i]:
            q[(0,) * k] = v0[i]
        for j in range(k):
            c = verts[j + 1][i] - v0[i]
            if c:
                e = [0] * k
                e[j] = 1
                q[tuple(e)] = q.get(tuple(e), 0) + c
        lin.append(q)
    powers: dict = {}

    def power(i, n):
        key = (i, n)
        if key not in powers:
            powers[key] = {(0,) * k: Fraction(1)} if n == 0 else _poly_mul(power(i, n - 1), lin[i])
        return powers[key]

    total = Fraction(0)
    for e, v in p.items():
        q = {(0,) * k: Fraction(v)}
        for i, n in enumerate(e):
            if n:
                q = _poly_mul(q, power(i, n))
        for a, c in q.items():
            total += c * _simplex_moment(a)
    return total


def evaluate(t: PLChain, omega: TestForm) -> Fraction:
    """Σ θ_i ∫_{σ_i} ω, exact."""
    if omega.degree != t.k:
        raise DegreeMismatch(f"form of degree {omega.degree} against a {t.k}-chain")
    if omega.ambient != t.ambient:
        raise DegreeMismatch("form and chain live in different ambient dimensions")
    total = Fraction(0)
    polys = omega.polys()
    for key, c in t.items():
        if t.k == 0:
            x = key[0]
            for _, p in polys:
                for e, v in p.items():
                    term = Fraction(v)
                    for xi, n in zip(x, e):
                        term *= xi ** n
                    total += c * term
            continue
        v0 = key[0]
        edges = [[vj[i] - v0[i] for vj in key[1:]] for i in range(t.ambient)]
        for idx, p in polys:
            jac = det([edges[i] for i in idx])
            if jac:
                total += c * jac * _integrate_over_simplex(key, p)
    return total
