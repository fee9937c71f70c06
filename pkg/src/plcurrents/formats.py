"""JSON documents with exact rationals written as "p/q" strings.

Canonical files hold no floating point.  Reports may add decimal views next
to the exact text, but the parsers only ever read the exact fields.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .chain import PLChain, PolyChain
from .complex import SimplicialComplex
from .exact import SqrtSum
from .nerve import MetricPointCloud, NagataCover


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
        self.line = line
        self.column = column


def q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_q(v) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise FormatError(f"expected an exact rational, got {v!r}")
    try:
        return Fraction(v.strip()) if isinstance(v, str) else Fraction(int(v))
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad rational {v!r}") from e


def _coeff(v) -> int | str:
    v = Fraction(v)
    return int(v) if v.denominator == 1 else q(v)


def loads(text: str) -> Any:
    if not text.strip():
        raise FormatError("empty document", 1, 1)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, e.lineno, e.colno) from e


def load(path: str | Path) -> Any:
    return loads(Path(path).read_text())


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def _require(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r}")
    v = doc[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return v


# ----------------------------------------------------------------------------
# Values

def sqrt_sum_to_json(v: SqrtSum) -> dict:
    return {"terms": [[n, q(c)] for n, c in sorted(v.terms.items())],
            "text": v.to_text(), "decimal": float(v)}


def sqrt_sum_from_json(doc) -> SqrtSum:
    return SqrtSum({int(n): parse_q(c) for n, c in _require(doc, "terms", list)})


def complex_to_json(c: SimplicialComplex) -> dict:
    doc = {"simplices": [list(s) for s in c.maximal()], "epsilon": q(c.epsilon),
           "n_vertices": c.n_vertices}
    if c.coords is not None:
        doc["vertices"] = [[q(v) for v in p] for p in c.coords]
    return doc


def complex_from_json(doc) -> SimplicialComplex:
    verts = doc.get("vertices") if isinstance(doc, dict) else None
    coords = [[parse_q(v) for v in p] for p in verts] if verts is not None else None
    simplices = _require(doc, "simplices", list)
    n = doc.get("n_vertices")
    if n is None:
        n = len(coords) if coords is not None else 1 + max((max(s) for s in simplices), default=-1)
    try:
        return SimplicialComplex.from_maximal(simplices, coords, parse_q(doc.get("epsilon", 1)), int(n))
    except (ValueError, TypeError) as e:
        raise FormatError(str(e)) from e


def chain_to_json(t: PLChain) -> dict:
    return {"k": t.k, "ambient": t.ambient,
            "terms": [{"vertices": [[q(v) for v in p] for p in key], "coeff": c} for key, c in t.items()]}


def chain_from_json(doc) -> PLChain:
    k = _require(doc, "k", int)
    terms = []
    for term in _require(doc, "terms", list):
        verts = tuple(tuple(parse_q(v) for v in p) for p in _require(term, "vertices", list))
        c = _require(term, "coeff")
        if not isinstance(c, int) or isinstance(c, bool):
            raise FormatError("chain coefficients must be integers")
        terms.append((verts, c))
    ambient = doc.get("ambient") or (len(terms[0][0][0]) if terms else 0)
    try:
        return PLChain(k, int(ambient), terms)
    except ValueError as e:
        raise FormatError(str(e)) from e


def polychain_to_json(p: PolyChain) -> dict:
    return {"k": p.k, "terms": [{"simplex": list(s), "coeff": _coeff(v)} for s, v in p.items()]}


def polychain_from_json(doc, c: SimplicialComplex) -> PolyChain:
    k = _require(doc, "k", int)
    coeffs = []
    for term in _require(doc, "terms", list):
        v = _require(term, "coeff")
        coeffs.append((tuple(_require(term, "simplex", list)), parse_q(v)))
    try:
        return PolyChain(c, k, coeffs)
    except ValueError as e:
        raise FormatError(str(e)) from e


def cloud_to_json(cloud: MetricPointCloud) -> dict:
    if cloud.euclidean:
        return {"points": [[q(v) for v in p] for p in cloud.points]}
    return {"distances": [[q(v) for v in row] for row in cloud.matrix]}


def cloud_from_json(doc) -> MetricPointCloud:
    if not isinstance(doc, dict):
        raise FormatError("a cloud document is an object")
    try:
        if "points" in doc:
            return MetricPointCloud.from_points([[parse_q(v) for v in p] for p in doc["points"]])
        if "distances" in doc:
            return MetricPointCloud.from_distances([[parse_q(v) for v in r] for r in doc["distances"]])
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(str(e)) from e
    raise FormatError("a cloud needs 'points' or 'distances'")


def cover_to_json(cover: NagataCover) -> dict:
    return {"s": q(cover.s), "n": cover.n, "c": cover.c, "multiplicity": cover.multiplicity,
            "sets": cover.sets, "centers": cover.centers, "strategy": cover.strategy}


def cover_from_json(doc) -> NagataCover:
    sets = [list(map(int, b)) for b in _require(doc, "sets", list)]
    owner = [0] * sum(len(b) for b in sets)
    for i, b in enumerate(sets):
        for x in b:
            owner[x] = i
    return NagataCover(parse_q(_require(doc, "s")), sets, list(doc.get("centers", [b[0] for b in sets])),
                       int(doc.get("n", 0)), float(doc.get("c", 0.0)), int(doc.get("multiplicity", 1)),
                       doc.get("strategy", "greedy-net"), owner)
