"""Command-line front end.

Every subcommand reads JSON documents (see :mod:`plcurrents.formats`) and
writes one JSON document to ``--out`` or stdout.  Outputs record the full run
configuration including the seed, carry no timestamps, and are byte-identical
across reruns of the same configuration.

Exit codes: 0 success, 2 validation error, 3 infeasible or obstructed,
4 retry budget exhausted.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import fixtures
from .chain import ChainError, PLChain
from .complex import ComplexError
from .deform import (CenterHit, DeformError, GenericPointOnTermBoundary, PreRefinementError,
                     deform)
from .fill import (FillError, NotABoundary, NotACycle, SubcomplexInvalid, cone_fill, fillvol,
                   flat_norm, undistortion_report)
from .formats import (FormatError, chain_from_json, chain_to_json, cloud_from_json, complex_from_json,
                      complex_to_json, cover_to_json, dumps, load, polychain_from_json,
                      polychain_to_json, q, sqrt_sum_to_json)
from .nerve import EmptyCloud, CloudError, build_cover, build_nerve, verify_structure

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_RETRIES = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, msg: str, code: int, extra: dict | None = None):
        super().__init__(msg)
        self.code = code
        self.extra = extra or {}


def _num(x: float):
    """JSON-safe float view (inf and nan become strings)."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in cfg.items()}


def _load_complex(path):
    return complex_from_json(load(path))


def _polychain(path, c):
    return polychain_from_json(load(path), c)


# ----------------------------------------------------------------------------
# Subcommands

def cmd_build_nerve(args) -> dict:
    cloud = cloud_from_json(load(args.cloud))
    cover = build_cover(cloud, args.s)
    nerve = build_nerve(cover, cloud)
    report = verify_structure(nerve, cloud, subdivision_depth=args.subdiv_depth)
    return {
        "cover": cover_to_json(cover),
        "complex": complex_to_json(nerve.complex),
        "dim": nerve.complex.dim,
        "psi": [{str(i): w for i, w in ps.items()} for ps in nerve.psi],
        "tau": [{str(i): t.to_text() for i, t in tv.items()} for tv in nerve.taus],
        "phi0": nerve.phi0,
        "report": {k: _num(v) for k, v in report.as_dict().items()},
    }


def _verdict(v) -> dict | None:
    if v is None:
        return None
    return {"equal": v.equal, "mode": v.mode, "detail": {k: _num(x) for k, x in v.detail.items()}}


def cmd_deform(args) -> dict:
    x = _load_complex(args.complex)
    t = chain_from_json(load(args.chain))
    res = deform(x, t, args.k, seed=args.seed, samples=args.samples, retries=args.retries,
                 equality=args.equality)
    centers = {}
    for s, ch in sorted(res.centers.items()):
        centers[",".join(map(str, s))] = {"point": [q(v) for v in ch.point], "K": [_num(ch.K1), _num(ch.K2)],
                                          "candidates": ch.candidates, "no_mass": ch.no_mass}
    return {
        "k": res.k,
        "P": polychain_to_json(res.P),
        "R": chain_to_json(res.R),
        "S": chain_to_json(res.S),
        "certificate": _verdict(res.certificate),
        "boundary_check": _verdict(res.boundary_check),
        "supports": res.supports,
        "ledger": [{"simplex": list(r.simplex), "P": list(r.P), "dP": list(r.dP), "S": list(r.S),
                    "R": list(r.R), "ratios": {k: _num(v) for k, v in r.ratios().items()}}
                   for r in res.ledger],
        "max_ratios": {k: _num(v) for k, v in res.max_ratios.items()},
        "global_ratios": {k: _num(v) for k, v in res.global_ratios.items()},
        "centers": centers,
        "note": res.note,
    }


def _filling_doc(res) -> dict:
    return {"S": polychain_to_json(res.S), "value": sqrt_sum_to_json(res.value),
            "lp_value": sqrt_sum_to_json(res.lp_value), "gap": res.gap, "mode": res.mode,
            "integral": res.integral, "stats": res.stats}


def cmd_fillvol(args) -> dict:
    c = _load_complex(args.complex)
    t = _polychain(args.cycle, c)
    return _filling_doc(fillvol(c, t, args.mode))


def cmd_flatnorm(args) -> dict:
    c = _load_complex(args.complex)
    t = _polychain(args.chain, c)
    res = flat_norm(c, t, args.mode)
    return {"U": polychain_to_json(res.U), "V": polychain_to_json(res.V) if res.V is not None else None,
            "value": sqrt_sum_to_json(res.value), "mass": sqrt_sum_to_json(t.mass()), "mode": res.mode}


def cmd_cone(args) -> dict:
    t = chain_from_json(load(args.chain))
    apex = [a.strip() for a in args.apex.split(",")]
    res = cone_fill(t, apex)
    return {"S": chain_to_json(res.S), "mass": sqrt_sum_to_json(res.mass),
            "bound": sqrt_sum_to_json(res.bound),
            "diameter_bound": sqrt_sum_to_json(res.diameter_bound) if res.diameter_bound is not None else None}


def cmd_undistortion(args) -> dict:
    y = _load_complex(args.ambient)
    x = _load_complex(args.sub)
    doc = load(args.cycles)
    items = doc.get("cycles") if isinstance(doc, dict) else doc
    if not isinstance(items, list):
        raise FormatError("expected a list of cycles")
    cycles = [polychain_from_json(d, y) for d in items]
    rep = undistortion_report(y, x, cycles, args.mode)
    rows = []
    for r in rep.rows:
        rows.append({"cycle": polychain_to_json(r.cycle),
                     "fill_x": sqrt_sum_to_json(r.fill_x) if r.fill_x is not None else None,
                     "fill_y": sqrt_sum_to_json(r.fill_y) if r.fill_y is not None else None,
                     "ratio": _num(r.ratio), "flag": r.flag,
                     "certificate": ({",".join(map(str, e)): q(v) for e, v in sorted(r.certificate.items())}
                                     if r.certificate else None)})
    return {"rows": rows, "max_ratio": _num(rep.max_ratio), "obstructed": rep.obstructed,
            "infinite_distortion": rep.infinite}


def cmd_fixture(args) -> dict:
    """Write a named fixture's input files into a directory."""
    out = Path(args.directory)
    out.mkdir(parents=True, exist_ok=True)
    files = {}

    def put(name, doc):
        (out / name).write_text(dumps(doc))
        files[name] = str(out / name)

    name = args.name
    if name == "concentric":
        x, t = fixtures.concentric_triangle()
        put("complex.json", complex_to_json(x))
        put("chain.json", chain_to_json(t))
    elif name in ("unit-grid", "inner-block", "single-face"):
        x, t = {"unit-grid": fixtures.unit_grid, "inner-block": fixtures.inner_block,
                "single-face": fixtures.single_face}[name]()
        put("complex.json", complex_to_json(x))
        put("cycle.json", polychain_to_json(t))
    elif name in ("l-shape", "box", "annulus"):
        y, x, cycles = {"l-shape": fixtures.l_shape, "box": fixtures.box_and_surface,
                        "annulus": fixtures.annulus}[name]()
        put("ambient.json", complex_to_json(y))
        put("sub.json", complex_to_json(x))
        put("cycles.json", {"cycles": [polychain_to_json(t) for t in cycles]})
    elif name == "line":
        put("cloud.json", {"points": [[str(i)] for i in range(11)]})
    elif name == "grid-cloud":
        put("cloud.json", {"points": [[q(fixtures.F(i, 19)), q(fixtures.F(j, 19))]
                                      for j in range(20) for i in range(20)]})
    else:
        raise CliError(f"unknown fixture {name!r}", EXIT_INVALID)
    return {"fixture": name, "files": files}


FIXTURES = ("concentric", "unit-grid", "inner-block", "single-face", "l-shape", "box", "annulus",
            "line", "grid-cloud")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plcurrents", description="Exact PL chains, fillings and deformations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=("lp", "ilp"), default="lp")
    common.add_argument("--equality", choices=("exact", "fast"), default="exact")
    common.add_argument("--samples", type=int, default=16)
    common.add_argument("--retries", type=int, default=32)
    common.add_argument("--subdiv-depth", type=int, default=1)
    common.add_argument("--out", type=Path)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build-nerve", parents=[common], help="cover, nerve and structure report of a cloud")
    s.add_argument("cloud")
    s.add_argument("--s", required=True, help="cover scale, e.g. 3/20")
    s.set_defaults(func=cmd_build_nerve)

    s = sub.add_parser("deform", parents=[common], help="T = P + R + ∂S with the mass ledger")
    s.add_argument("complex")
    s.add_argument("chain")
    s.add_argument("--k", type=int)
    s.set_defaults(func=cmd_deform)

    s = sub.add_parser("fillvol", parents=[common], help="least-mass filling of a cycle")
    s.add_argument("complex")
    s.add_argument("cycle")
    s.set_defaults(func=cmd_fillvol)

    s = sub.add_parser("flatnorm", parents=[common], help="flat norm of a chain")
    s.add_argument("complex")
    s.add_argument("chain")
    s.set_defaults(func=cmd_flatnorm)

    s = sub.add_parser("cone", parents=[common], help="cone filling of a PL cycle")
    s.add_argument("chain")
    s.add_argument("--apex", required=True, help="comma-separated coordinates")
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("undistortion", parents=[common], help="Fillvol_X / Fillvol_Y per cycle")
    s.add_argument("ambient")
    s.add_argument("sub")
    s.add_argument("cycles")
    s.set_defaults(func=cmd_undistortion)

    s = sub.add_parser("fixture", parents=[common], help="write a named fixture's input files")
    s.add_argument("name", choices=FIXTURES)
    s.add_argument("directory")
    s.set_defaults(func=cmd_fixture)
    return p


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    try:
        body = args.func(args)
        code, status = EXIT_OK, "ok"
    except CliError as e:
        code, status, body = e.code, "error", {"error": str(e), **e.extra}
    except PreRefinementError as e:
        code, status, body = EXIT_INVALID, "error", {"error": str(e), "term_index": e.term_index}
    except (CenterHit, GenericPointOnTermBoundary) as e:
        code, status, body = EXIT_RETRIES, "error", {"error": f"retry budget exhausted: {e}"}
    except NotABoundary as e:
        cert = ({",".join(map(str, k)): q(v) for k, v in sorted(e.certificate.items())}
                if e.certificate else None)
        code, status, body = EXIT_INFEASIBLE, "obstruction", {"error": str(e), "certificate": cert}
    except FormatError as e:
        code, status, body = EXIT_INVALID, "error", {"error": str(e), "line": e.line, "column": e.column}
    except (NotACycle, SubcomplexInvalid, EmptyCloud, CloudError, ChainError, ComplexError,
            DeformError, FillError, FileNotFoundError, ValueError) as e:
        code, status, body = EXIT_INVALID, "error", {"error": f"{type(e).__name__}: {e}"}
    doc = {"command": args.command, "config": _config(args), "seed": args.seed, "status": status, **body}
    text = dumps(doc)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code, doc


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
