"""Exact points, lines, and planes in 3-space with the incidence predicates.

A Line3 is stored canonically: primitive integer direction whose first
nonzero component is positive, and the unique anchor point whose coordinate
at the direction's first nonzero index is 0.  Two descriptions of the same
geometric line therefore compare equal, which is what makes deduplication
and deterministic enumeration work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateInputError
from .exactcore import Mat, Vec3, det4, primitive_integer


@dataclass(frozen=True)
class Point3:
    x: Fraction
    y: Fraction
    z: Fraction

    def __post_init__(self):
        if not isinstance(self.x, Fraction):
            object.__setattr__(self, "x", Fraction(self.x))
        if not isinstance(self.y, Fraction):
            object.__setattr__(self, "y", Fraction(self.y))
        if not isinstance(self.z, Fraction):
            object.__setattr__(self, "z", Fraction(self.z))

    def as_vec(self) -> Vec3:
        return Vec3(self.x, self.y, self.z)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z)

    def sort_key(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Line3:
    anchor: Point3
    direction: tuple[int, int, int]

    def sort_key(self):
        return (self.direction, self.anchor.sort_key())

    def point_at(self, t) -> Point3:
        t = Fraction(t)
        return Point3(
            self.anchor.x + t * self.direction[0],
            self.anchor.y + t * self.direction[1],
            self.anchor.z + t * self.direction[2],
        )


@dataclass(frozen=True)
class Plane3:
    """Locus normal·u + offset = 0; normal primitive, first nonzero positive."""

    normal: tuple[int, int, int]
    offset: Fraction

    def __post_init__(self):
        if not isinstance(self.offset, Fraction):
            object.__setattr__(self, "offset", Fraction(self.offset))

    def sort_key(self):
        return (self.normal, self.offset)

    def eval_at(self, a: Point3) -> Fraction:
        n = self.normal
        return n[0] * a.x + n[1] * a.y + n[2] * a.z + self.offset


class _SameLine:
    """Distinguished outcome of line_intersection on identical lines."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "SAME_LINE"


SAME_LINE = _SameLine()


def canonicalize_line(point: Point3, direction: Vec3) -> Line3:
    """Canonical Line3 through `point` with direction parallel to `direction`."""
    if direction.is_zero():
        raise DegenerateInputError("line direction must be nonzero")
    d = primitive_integer(direction.as_tuple())
    j = next(i for i, v in enumerate(d) if v != 0)
    coords = point.as_tuple()
    t = -coords[j] / Fraction(d[j])
    anchor = Point3(coords[0] + t * d[0], coords[1] + t * d[1], coords[2] + t * d[2])
    return Line3(anchor, d)


def line_through(a: Point3, b: Point3) -> Line3:
    if a == b:
        raise DegenerateInputError("two distinct points are needed")
    return canonicalize_line(a, b.as_vec() - a.as_vec())


def point_on_line(a: Point3, line: Line3) -> bool:
    an = line.anchor
    d0, d1, d2 = line.direction
    # integer fast path: most data lives on the lattice
    if (
        a.x.denominator == 1
        and a.y.denominator == 1
        and a.z.denominator == 1
        and an.x.denominator == 1
        and an.y.denominator == 1
        and an.z.denominator == 1
    ):
        wx = a.x.numerator - an.x.numerator
        wy = a.y.numerator - an.y.numerator
        wz = a.z.numerator - an.z.numerator
    else:
        wx = a.x - an.x
        wy = a.y - an.y
        wz = a.z - an.z
    # w parallel to d  <=>  cross(w, d) = 0
    return wy * d2 == wz * d1 and wz * d0 == wx * d2 and wx * d1 == wy * d0


def lines_coplanar(l1: Line3, l2: Line3) -> bool:
    """True iff the lines intersect or are parallel (4x4 homogeneous determinant)."""
    a1, d1 = l1.anchor, l1.direction
    a2, d2 = l2.anchor, l2.direction
    m = Mat(
        [
            [a1.x, a1.y, a1.z, 1],
            [a1.x + d1[0], a1.y + d1[1], a1.z + d1[2], 1],
            [a2.x, a2.y, a2.z, 1],
            [a2.x + d2[0], a2.y + d2[1], a2.z + d2[2], 1],
        ]
    )
    return det4(m) == 0


def _directions_parallel(d1: tuple[int, int, int], d2: tuple[int, int, int]) -> bool:
    return (
        d1[1] * d2[2] - d1[2] * d2[1] == 0
        and d1[2] * d2[0] - d1[0] * d2[2] == 0
        and d1[0] * d2[1] - d1[1] * d2[0] == 0
    )


def line_intersection(l1: Line3, l2: Line3):
    """Unique common point, SAME_LINE for identical lines, None otherwise."""
    if l1 == l2:
        return SAME_LINE
    if _directions_parallel(l1.direction, l2.direction):
        return None  # distinct parallel lines (canonical form makes equality exact)
    if not lines_coplanar(l1, l2):
        return None
    # Solve a1 + t d1 = a2 + s d2 from two independent coordinate equations.
    d1, d2 = l1.direction, l2.direction
    rhs = l2.anchor.as_vec() - l1.anchor.as_vec()
    rows = ((0, 1), (0, 2), (1, 2))
    for i, j in rows:
        det = d1[i] * (-d2[j]) - (-d2[i]) * d1[j]
        if det != 0:
            r = rhs.as_tuple()
            t = (r[i] * Fraction(-d2[j]) - Fraction(-d2[i]) * r[j]) / det
            return l1.point_at(t)
    raise AssertionError("non-parallel directions must have an invertible 2x2 block")


def plane_through(a: Point3, b: Point3, c: Point3) -> Plane3 | None:
    """Plane spanned by three points; None when they are collinear."""
    n = (b.as_vec() - a.as_vec()).cross(c.as_vec() - a.as_vec())
    if n.is_zero():
        return None
    normal = primitive_integer(n.as_tuple())
    offset = -(normal[0] * a.x + normal[1] * a.y + normal[2] * a.z)
    return Plane3(normal, offset)


def plane_from_point_normal(a: Point3, normal_raw) -> Plane3:
    normal = primitive_integer(tuple(normal_raw))
    offset = -(normal[0] * a.x + normal[1] * a.y + normal[2] * a.z)
    return Plane3(normal, offset)


def point_in_plane(a: Point3, plane: Plane3) -> bool:
    return plane.eval_at(a) == 0


def line_in_plane(line: Line3, plane: Plane3) -> bool:
    n = plane.normal
    d = line.direction
    return point_in_plane(line.anchor, plane) and n[0] * d[0] + n[1] * d[1] + n[2] * d[2] == 0
