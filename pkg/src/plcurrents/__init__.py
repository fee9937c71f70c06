"""Exact piecewise-linear integral chains on finite simplicial complexes.

Chains, boundaries, cones and prisms in rational arithmetic; nerve
approximation of point clouds; the deformation of a chain onto a skeleton with
per-simplex mass bookkeeping; and filling volumes and flat norms by exact
linear programming.
"""
from .chain import PLChain, PolyChain, boundary, cone, mass, prism, pushforward
from .complex import SimplicialComplex, cube_grid_complex, grid_complex
from .deform import DeformationResult, TriangulatedSpace, deform
from .equality import chains_equal
from .exact import SqrtSum
from .fill import cone_fill, fillvol, flat_norm, isoperimetric_profile, undistortion_report
from .nerve import MetricPointCloud, build_cover, build_nerve, verify_structure

__all__ = [
    "PLChain", "PolyChain", "boundary", "cone", "mass", "prism", "pushforward",
    "SimplicialComplex", "cube_grid_complex", "grid_complex",
    "DeformationResult", "TriangulatedSpace", "deform",
    "chains_equal", "SqrtSum",
    "cone_fill", "fillvol", "flat_norm", "isoperimetric_profile", "undistortion_report",
    "MetricPointCloud", "build_cover", "build_nerve", "verify_structure",
]

__version__ = "0.1.0"
