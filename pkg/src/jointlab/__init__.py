"""Exact-arithmetic laboratory for points, lines, joints, and vanishing polynomials in 3-space."""

from .exactcore import Mat, Rat, Vec3, det3, det4, nullspace, rank, rat
from .geom import (
    SAME_LINE,
    Line3,
    Plane3,
    Point3,
    canonicalize_line,
    line_in_plane,
    line_intersection,
    line_through,
    lines_coplanar,
    plane_through,
    point_in_plane,
    point_on_line,
)
from .poly3 import (
    MultiPoly3,
    UniPoly,
    divexact,
    gradient,
    hessian,
    linear_factors,
    mpoly_gcd,
    resultant_x,
    resultant_y,
    resultant_z,
    restrict_to_line,
    squarefree_part,
    taylor2,
    vanishes_on_line,
    variables,
)

__all__ = [name for name in dir() if not name.startswith("_")]
