"""Algebraic point/line classification against a trivariate polynomial.

Vanishing-polynomial fitting, the three flatness polynomials, critical /
flat / regular classification, and the census operations whose counts the
critical-line and flat-line bounds are asserted on.

The canonical per-point flatness test is the tangent-basis Hessian: a is
flat iff b^T H_p(a) b' = 0 for a basis {b1, b2} of the tangent plane.  The
three flatness polynomials are computed alongside as diagnostics; they can
degenerate when the gradient is parallel to a coordinate plane, which is
exactly the frame assumption they carry.  Line-level flatness is decided by
restricting the full bilinear family (grad p x e_i)^T H_p (grad p x e_j),
whose six distinct members always span the tangent-plane form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import DegenerateInputError, PreconditionError, JointLabError
from .exactcore import Mat, nullspace, primitive_integer
from .geom import Line3, Plane3, Point3, line_intersection, point_on_line
from .incidence import dedupe_lines, dedupe_points
from .poly3 import (
    MultiPoly3,
    UniPoly,
    gradient,
    hessian,
    linear_factors,
    restrict_to_line,
    squarefree_part,
    vanishes_on_line,
)

OFF_SURFACE = "off_surface"
CRITICAL = "critical"
FLAT = "flat"
REGULAR_NONFLAT = "regular_nonflat"

CROSSING = "crossing"
CRITICAL_LINE = "critical_line"
FLAT_LINE = "flat_line"
ORDINARY_ON_SURFACE = "ordinary_on_surface"


def prop5_degree_bound(m: int) -> int:
    """Smallest d with C(d+3, 3) > m: a vanishing polynomial of that degree exists."""
    d = 0
    while comb(d + 3, 3) <= m:
        d += 1
    return d


def monomials_upto(d: int) -> list[tuple[int, int, int]]:
    """Exponent triples of total degree <= d in descending grlex order."""
    monos = [
        (i, j, k)
        for i in range(d + 1)
        for j in range(d + 1 - i)
        for k in range(d + 1 - i - j)
    ]
    monos.sort(key=lambda t: (t[0] + t[1] + t[2], t[0], t[1], t[2]), reverse=True)
    return monos


def fit_vanishing_poly(points) -> MultiPoly3:
    """Lowest-degree square-free polynomial vanishing on all the points.

    Degree search goes upward from 0 and stops at the first nontrivial
    nullspace of the evaluation matrix, so the degree never exceeds the
    smallest d with C(d+3,3) > m.  The coefficient vector is the canonical
    first nullspace basis vector, making the output deterministic.
    """
    pts = dedupe_points(points)
    if not pts:
        return MultiPoly3.constant(1)
    coords = [(a.x, a.y, a.z) for a in pts]
    d = 0
    while True:
        monos = monomials_upto(d)
        rows = []
        for cx, cy, cz in coords:
            pows = (
                [cx**0] + [cx ** (e + 1) for e in range(d)],
                [cy**0] + [cy ** (e + 1) for e in range(d)],
                [cz**0] + [cz ** (e + 1) for e in range(d)],
            )
            rows.append([pows[0][i] * pows[1][j] * pows[2][k] for (i, j, k) in monos])
        basis = nullspace(Mat(rows))
        if basis:
            coeffs = basis[0]
            poly = MultiPoly3({monos[c]: coeffs[c] for c in range(len(monos))})
            return squarefree_part(poly)
        d += 1


def _cross_with_unit(g, j: int):
    """g x e_j for a 3-tuple g of scalars or polynomials."""
    if j == 0:
        return (g[0] * 0, g[2], -g[1])
    if j == 1:
        return (-g[2], g[1] * 0, g[0])
    return (g[1], -g[0], g[2] * 0)


def flatness_polys(p: MultiPoly3) -> list[MultiPoly3]:
    """The three polynomials (grad p x e_j)^T H_p (grad p x e_j), degree <= 3d-4."""
    if p.is_zero() or p.degree < 1:
        raise PreconditionError("flatness polynomials need a nonconstant polynomial")
    g = gradient(p)
    H = hessian(p)
    out = []
    for j in range(3):
        v = _cross_with_unit(g, j)
        acc = MultiPoly3()
        for r in range(3):
            for s in range(3):
                if not H[r][s].is_zero():
                    acc = acc + v[r] * H[r][s] * v[s]
        out.append(acc)
    return out


def tangent_basis(g: tuple[Fraction, Fraction, Fraction]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Primitive integer basis of the plane orthogonal to a nonzero gradient.

    Scans the cross products g x e_j for j = 3, 2, 1; the first nonzero one
    and the next one independent of it always exist and span g-perp.
    """
    crosses = [
        (Fraction(0), Fraction(g[2]), -Fraction(g[1])),
        (-Fraction(g[2]), Fraction(0), Fraction(g[0])),
        (Fraction(g[1]), -Fraction(g[0]), Fraction(0)),
    ]
    picked: list[tuple[int, ...]] = []
    for j in (2, 1, 0):
        c = crosses[j]
        if all(v == 0 for v in c):
            continue
        cand = primitive_integer(c)
        if not picked:
            picked.append(cand)
            continue
        b = picked[0]
        cx = (
            b[1] * cand[2] - b[2] * cand[1],
            b[2] * cand[0] - b[0] * cand[2],
            b[0] * cand[1] - b[1] * cand[0],
        )
        if cx != (0, 0, 0):
            picked.append(cand)
            break
    if len(picked) != 2:
        raise DegenerateInputError("gradient must be nonzero for a tangent basis")
    return picked[0], picked[1]


@dataclass
class PointClassification:
    kind: str
    value: Fraction
    grad: tuple[Fraction, Fraction, Fraction]
    pi_values: tuple[Fraction, Fraction, Fraction] | None = None
    basis: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    tangent_entries: tuple[Fraction, Fraction, Fraction] | None = None  # b1Hb1, b1Hb2, b2Hb2
    frame_degenerate: bool = False  # gradient parallel to a coordinate plane


def classify_point(p: MultiPoly3, a: Point3) -> PointClassification:
    """OffSurface / Critical / Flat / RegularNonFlat with exact diagnostics."""
    val = p.eval(a)
    g = tuple(gi.eval(a) for gi in gradient(p))
    if val != 0:
        return PointClassification(OFF_SURFACE, val, g)
    if g == (0, 0, 0):
        return PointClassification(CRITICAL, val, g)
    H = [[hij.eval(a) for hij in row] for row in hessian(p)]

    def quad(u, v) -> Fraction:
        return sum(Fraction(u[r]) * H[r][s] * Fraction(v[s]) for r in range(3) for s in range(3))

    pi_vals = tuple(quad(c, c) for c in (_cross_with_unit(g, j) for j in range(3)))
    b1, b2 = tangent_basis(g)
    entries = (quad(b1, b1), quad(b1, b2), quad(b2, b2))
    kind = FLAT if all(e == 0 for e in entries) else REGULAR_NONFLAT
    return PointClassification(
        kind,
        val,
        g,
        pi_values=pi_vals,
        basis=(b1, b2),
        tangent_entries=entries,
        frame_degenerate=any(c == 0 for c in g),
    )


@dataclass
class LineClassification:
    kind: str
    grad_restrictions_zero: tuple[bool, bool, bool] | None = None
    bilinear_restrictions_zero: tuple[bool, ...] | None = None  # (i,j) for i<=j


def classify_line(p: MultiPoly3, line: Line3) -> LineClassification:
    """Crossing / CriticalLine / FlatLine / OrdinaryOnSurface.

    Works on restrictions to the line: restriction is a ring homomorphism,
    so the flatness family can be evaluated in univariate arithmetic.
    """
    if not restrict_to_line(p, line).is_zero():
        return LineClassification(CROSSING)
    g_res = [restrict_to_line(gi, line) for gi in gradient(p)]
    grad_zero = tuple(gi.is_zero() for gi in g_res)
    if all(grad_zero):
        return LineClassification(CRITICAL_LINE, grad_zero)
    H_res = [[restrict_to_line(hij, line) for hij in row] for row in hessian(p)]
    crosses = [_cross_with_unit(g_res, j) for j in range(3)]
    flat_flags = []
    for i, j in ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)):
        acc = UniPoly()
        for r in range(3):
            for s in range(3):
                if not H_res[r][s].is_zero():
                    acc = acc + crosses[i][r] * H_res[r][s] * crosses[j][s]
        flat_flags.append(acc.is_zero())
    kind = FLAT_LINE if all(flat_flags) else ORDINARY_ON_SURFACE
    return LineClassification(kind, grad_zero, tuple(flat_flags))


@dataclass
class LineCensus:
    counts: dict[str, int]
    degree: int
    critical_bound: int  # d(d-1)
    flat_bound: int  # 3d^2 - 4d
    flat_bound_asserted: bool  # only when p has no linear factor
    classified: list[tuple[Line3, str]]


def count_classified_lines(p: MultiPoly3, lines) -> LineCensus:
    """Classify each line and assert the critical/flat count bounds.

    The critical bound d(d-1) holds for any square-free p; the flat bound
    3d^2-4d additionally needs p to have no linear factors, otherwise the
    count is only reported.
    """
    if p.is_zero():
        raise PreconditionError("census needs a nonzero polynomial")
    if squarefree_part(p) != p:
        raise PreconditionError("census needs a square-free polynomial")
    lns = dedupe_lines(lines)
    counts = {CROSSING: 0, CRITICAL_LINE: 0, FLAT_LINE: 0, ORDINARY_ON_SURFACE: 0}
    classified = []
    for ln in lns:
        kind = classify_line(p, ln).kind
        counts[kind] += 1
        classified.append((ln, kind))
    d = int(p.degree) if p.degree >= 1 else 0
    crit_bound = d * (d - 1)
    flat_bound = 3 * d * d - 4 * d
    if counts[CRITICAL_LINE] > crit_bound:
        raise JointLabError(
            f"critical-line bound violated: {counts[CRITICAL_LINE]} > {crit_bound}"
        )
    no_linear = d >= 1 and not linear_factors(p)[0]
    if no_linear and counts[FLAT_LINE] > flat_bound:
        raise JointLabError(f"flat-line bound violated: {counts[FLAT_LINE]} > {flat_bound}")
    return LineCensus(counts, d, crit_bound, flat_bound, no_linear, classified)


def coplanarity_at_regular(p: MultiPoly3, a: Point3, lines_through_a) -> bool:
    """All directions of vanishing lines through a regular point are tangent.

    Preconditions (a regular on Z(p), lines through a, p vanishing on each)
    are enforced; the returned truth value is the asserted property that
    every direction is orthogonal to the gradient.
    """
    if p.eval(a) != 0:
        raise PreconditionError("point is not on the zero set")
    g = tuple(gi.eval(a) for gi in gradient(p))
    if g == (0, 0, 0):
        raise PreconditionError("point is critical, not regular")
    lns = dedupe_lines(lines_through_a)
    for ln in lns:
        if not point_on_line(a, ln):
            raise PreconditionError(f"line {ln} does not pass through the point")
        if not vanishes_on_line(p, ln):
            raise PreconditionError(f"polynomial does not vanish on {ln}")
    return all(
        g[0] * ln.direction[0] + g[1] * ln.direction[1] + g[2] * ln.direction[2] == 0
        for ln in lns
    )


@dataclass
class Prop12Census:
    points: list[Point3]
    incidences: int
    line_census: LineCensus
    n: int
    d: int
    nd: int
    d_cubed: int


def prop12_census(p: MultiPoly3, lines) -> Prop12Census:
    """Points of Z(p) on >= 3 of the lines, their incidences, and the line census."""
    if p.is_zero():
        raise PreconditionError("census needs a nonzero polynomial")
    if squarefree_part(p) != p:
        raise PreconditionError("census needs a square-free polynomial")
    if linear_factors(p)[0]:
        raise PreconditionError("polynomial must have no linear factors")
    lns = dedupe_lines(lines)
    candidates: set[Point3] = set()
    for i, j in combinations(range(len(lns)), 2):
        hit = line_intersection(lns[i], lns[j])
        if isinstance(hit, Point3) and p.eval(hit) == 0:
            candidates.add(hit)
    pts = []
    incid = 0
    for a in sorted(candidates, key=Point3.sort_key):
        mu = sum(1 for ln in lns if point_on_line(a, ln))
        if mu >= 3:
            pts.append(a)
            incid += mu
    census = count_classified_lines(p, lns)
    d = census.degree
    n = len(lns)
    return Prop12Census(pts, incid, census, n, d, n * d, d**3)
