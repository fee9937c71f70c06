"""Named inputs shared by tests, the acceptance suite and the command line.

The deformation suite is fixed up front: a seeded generator draws every chain,
so the set never depends on how any particular run turned out.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .chain import PLChain, PolyChain
from .complex import SimplicialComplex, boundary_subcomplex, cube_grid_complex, grid_complex
from .fill import edge_path, grid_loop

F = Fraction


def concentric_triangle() -> tuple[SimplicialComplex, PLChain]:
    """A triangle 1-cycle shrunk by 1/2 about the centroid of face (0,1,3) of the unit square."""
    x = grid_complex(1, 1)
    face = [x.coords[v] for v in (0, 1, 3)]
    g = tuple(sum(p[i] for p in face) / 3 for i in range(2))
    inner = [tuple(g[i] + (p[i] - g[i]) / 2 for i in range(2)) for p in face]
    t = PLChain(1, 2, [((inner[i], inner[(i + 1) % 3]), 1) for i in range(3)])
    return x, t


def _random_point(rng: np.random.Generator, hi: int, dim: int, den: int = 7):
    # a seventh-grid point nudged by multiples of 1/97 keeps vertices off grid planes
    return tuple(F(int(rng.integers(1, hi * den)), den) + F(1, 97) * int(rng.integers(0, 3))
                 for _ in range(dim))


def deformation_suite(seed: int = 5) -> list[tuple[str, SimplicialComplex, PLChain]]:
    """21 chains on a 3×3 square grid and a 2×2×2 cube grid."""
    rng = np.random.default_rng(seed)
    x2 = grid_complex(3, 3)
    x3 = cube_grid_complex(2, 2, 2)
    sq, t = concentric_triangle()
    out = [("concentric", sq, t)]
    for i in range(5):
        pts = [_random_point(rng, 3, 2) for _ in range(4)]
        out.append((f"path2d-{i}", x2, PLChain(1, 2, [((pts[j], pts[j + 1]), 1) for j in range(3)])))
    for i in range(3):
        pts = [_random_point(rng, 3, 2) for _ in range(3)]
        out.append((f"cycle2d-{i}", x2, PLChain(1, 2, [((pts[j], pts[(j + 1) % 3]), 1) for j in range(3)])))
    for i in range(4):
        pts = [_random_point(rng, 3, 2) for _ in range(3)]
        out.append((f"triangle2d-{i}", x2, PLChain.simplex(pts, int(rng.integers(1, 3)))))
    a = [_random_point(rng, 3, 2) for _ in range(3)]
    b = [_random_point(rng, 3, 2) for _ in range(3)]
    out.append(("overlap2d", x2, PLChain(2, 2, [(tuple(a), 1), (tuple(b), -1)])))
    for i in range(5):
        pts = [_random_point(rng, 2, 3) for _ in range(3)]
        out.append((f"path3d-{i}", x3, PLChain(1, 3, [((pts[j], pts[j + 1]), 1) for j in range(2)])))
    for i in range(2):
        pts = [_random_point(rng, 2, 3) for _ in range(3)]
        out.append((f"triangle3d-{i}", x3, PLChain.simplex(pts)))
    return out


# ----------------------------------------------------------------------------
# Filling fixtures

def single_face():
    x = SimplicialComplex.from_maximal([(0, 1, 2)], [(0, 0), (2, 0), (0, 3)])
    return x, PolyChain(x, 2, {(0, 1, 2): 1}).boundary()


def unit_grid(n: int = 4):
    x = grid_complex(n, n, F(1, n))
    return x, grid_loop(x, ((0, 0), (n, n)), n)


def inner_block(n: int = 4, lo: int = 1, hi: int = 3):
    x = grid_complex(n, n, F(1, n))
    return x, grid_loop(x, ((lo, lo), (hi, hi)), n)


def l_shape():
    """A 4×4 square Y, the L left after removing its upper-right 2×2 block, and a unit loop in the L."""
    y = grid_complex(4, 4)
    keep = []
    for s in y.maximal():
        cx = sum(y.coords[v][0] for v in s) / 3
        cy = sum(y.coords[v][1] for v in s) / 3
        if not (cx > 2 and cy > 2):
            keep.append(s)
    x = y.subcomplex(keep)
    return y, x, [grid_loop(y, ((0, 0), (1, 1)), 4), grid_loop(y, ((0, 2), (1, 3)), 4),
                  grid_loop(y, ((0, 0), (2, 2)), 4)]


def box_and_surface():
    """Solid 2×2×2 box Y, its boundary surface X and the loop around the waist z = 1."""
    y = cube_grid_complex(2, 2, 2)
    x = boundary_subcomplex(y)
    vid = lambda i, j, k: (k * 3 + j) * 3 + i
    ring = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1), (0, 0)]
    return y, x, [edge_path(y, [vid(i, j, 1) for i, j in ring])]


def annulus():
    """A 3×3 square Y and X with the middle cell's two triangles removed; the loop around the hole."""
    y = grid_complex(3, 3)
    hole = {(5, 6, 10), (5, 9, 10)}
    x = y.subcomplex([s for s in y.maximal() if s not in hole])
    return y, x, [grid_loop(y, ((1, 1), (2, 2)), 3), grid_loop(y, ((0, 0), (1, 1)), 3)]
