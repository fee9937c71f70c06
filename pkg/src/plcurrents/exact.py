"""Exact rational linear algebra and sums of square roots.

Everything geometric in the package runs on ``fractions.Fraction``.  Volumes
of k-simplices with k below the ambient dimension are square roots of
rationals, so masses are carried as :class:`SqrtSum` values: finite rational
combinations of square roots whose sign can be decided exactly.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple  # tuple[Fraction, ...]


def frac(x) -> Fraction:
    """Coerce ints, Fractions, "p/q" strings and floats (exactly) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def point(coords: Iterable) -> Point:
    return tuple(frac(c) for c in coords)


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def scale(c: Fraction, a: Sequence[Fraction]) -> Point:
    return tuple(c * x for x in a)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    # integer numerator/denominator accumulation, one reduction at the end
    num, den = 0, 1
    for x, y in zip(a, b):
        xn, yn = x.numerator, y.numerator
        if xn and yn:
            pd = x.denominator * y.denominator
            num = num * pd + xn * yn * den
            den *= pd
    return Fraction(num, den)


def affine_combination(weights: Sequence[Fraction], points: Sequence[Point]) -> Point:
    d = len(points[0])
    out = [Fraction(0)] * d
    for w, p in zip(weights, points):
        if w:
            for i in range(d):
                out[i] += w * p[i]
    return tuple(out)


# ----------------------------------------------------------------------------
# Gaussian elimination over Q

def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(frac, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(frac, r)) for r in rows]
    n = len(m)
    if n == 0:
        return Fraction(1)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        piv = m[c][c]
        result *= piv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / piv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return result


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve a·x = b exactly.  Returns None when inconsistent; raises on non-uniqueness."""
    rows = [list(map(frac, r)) + [frac(v)] for r, v in zip(a, b)]
    nvars = len(rows[0]) - 1 if rows else 0
    red, piv = rref(rows)
    if piv and piv[-1] == nvars:
        return None
    if len(piv) < nvars:
        raise ValueError("linear system has no unique solution")
    x = [Fraction(0)] * nvars
    for r, c in zip(red, piv):
        x[c] = r[nvars]
    return x


def gram(vectors: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    return [[dot(u, v) for v in vectors] for u in vectors]


def barycentric(p: Sequence[Fraction], vertices: Sequence[Point]) -> list[Fraction] | None:
    """Barycentric coordinates of p w.r.t. affinely independent vertices; None if p ∉ aff."""
    v0 = vertices[0]
    edges = [sub(v, v0) for v in vertices[1:]]
    if not edges:
        return [Fraction(1)] if tuple(p) == tuple(v0) else None
    d = len(v0)
    a = [[e[i] for e in edges] for i in range(d)]
    rhs = sub(p, v0)
    x = solve(a, rhs)
    if x is None:
        return None
    return [1 - sum(x, Fraction(0))] + x


def squared_distance(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum(((x - y) ** 2 for x, y in zip(a, b)), Fraction(0))


# ----------------------------------------------------------------------------
# Sums of square roots

def _int_sqrt_bounds(n: int, bits: int) -> tuple[int, int]:
    """floor and ceil of sqrt(n)·2**bits."""
    s = math.isqrt(n << (2 * bits))
    return s, (s if s * s == n << (2 * bits) else s + 1)


class SqrtSum:
    """A finite sum Σ c_i·√n_i with rational c_i and positive integer n_i.

    Radicands are kept pairwise in distinct square classes, so the
    representation is zero exactly when every coefficient is zero; the sign
    of a nonzero value is then settled by integer interval refinement.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms: dict[int, Fraction] = {}
        if terms:
            for n, c in terms.items():
                self._add_term(n, frac(c))

    @classmethod
    def rational(cls, q) -> "SqrtSum":
        q = frac(q)
        return cls({1: q}) if q else cls()

    @classmethod
    def sqrt(cls, q) -> "SqrtSum":
        """√q for a rational q ≥ 0."""
        q = frac(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        if q == 0:
            return cls()
        num = q.numerator * q.denominator
        out = cls()
        out._add_term(num, Fraction(1, q.denominator))
        return out

    def _add_term(self, n: int, c: Fraction) -> None:
        if c == 0:
            return
        r = math.isqrt(n)
        if r * r == n:
            c, n = c * r, 1
        else:
            for m in (4, 9, 25, 49):
                while n % m == 0:
                    n //= m
                    c *= math.isqrt(m)
        for rep in self.terms:
            prod = rep * n
            s = math.isqrt(prod)
            if s * s == prod:
                # √n = s/√rep = (s/rep)·√rep
                new = self.terms[rep] + c * Fraction(s, rep)
                if new:
                    self.terms[rep] = new
                else:
                    del self.terms[rep]
                return
        self.terms[n] = c

    def _coerce(self, other) -> "SqrtSum":
        if isinstance(other, SqrtSum):
            return other
        if isinstance(other, float):
            if not math.isfinite(other):
                raise ValueError("non-finite float")
        return SqrtSum.rational(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = SqrtSum()
        out.terms = dict(self.terms)
        for n, c in other.terms.items():
            out._add_term(n, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = SqrtSum()
        out.terms = {n: -c for n, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return SqrtSum()
            out = SqrtSum()
            out.terms = {n: c * other for n, c in self.terms.items()}
            return out
        other = self._coerce(other)
        out = SqrtSum()
        for n1, c1 in self.terms.items():
            for n2, c2 in other.terms.items():
                out._add_term(n1 * n2, c1 * c2)
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return float(self) / float(other)

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return set(self.terms) <= {1}

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is irrational")
        return self.terms.get(1, Fraction(0))

    def sign(self) -> int:
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            (c,) = self.terms.values()
            return 1 if c > 0 else -1
        bits = 32
        while True:
            lo = Fraction(0)
            hi = Fraction(0)
            for n, c in self.terms.items():
                fl, ce = _int_sqrt_bounds(n, bits)
                if c > 0:
                    lo += c * fl
                    hi += c * ce
                else:
                    lo += c * ce
                    hi += c * fl
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        return (self - self._coerce(other)).sign()

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash(tuple(sorted(self.terms.items())))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return bool(self.terms)

    def __float__(self):
        # c·√n = ±√(c²n); the rational c²n stays representable even when n is huge
        return float(sum(math.copysign(math.sqrt(c * c * n), c) for n, c in self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "SqrtSum(0)"
        parts = []
        for n, c in sorted(self.terms.items()):
            parts.append(f"{c}" if n == 1 else f"{c}*sqrt({n})")
        return "SqrtSum(" + " + ".join(parts) + ")"

    def to_text(self) -> str:
        """Stable textual form used in reports, e.g. '1/2*sqrt(3) + 1'."""
        if not self.terms:
            return "0"
        parts = []
        for n, c in sorted(self.terms.items()):
            parts.append(f"{c}" if n == 1 else f"{c}*sqrt({n})")
        return " + ".join(parts)


def sqrt_sum_total(values: Iterable[SqrtSum]) -> SqrtSum:
    out = SqrtSum()
    for v in values:
        for n, c in v.terms.items():
            out._add_term(n, c)
    return out
