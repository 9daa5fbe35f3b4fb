"""Text formats for instances, polynomials, and traces.

Instance files: `point x y z` and `line px py pz dx dy dz` records, one per
line; `#` starts a comment; scalars are integers or num/den rationals (no
floats).  Parsing canonicalizes and deduplicates, so parse-then-serialize is
a fixed point.

Polynomial files: `term coef i j k` records meaning coef * x^i y^j z^k, with
unique exponent triples and no zero coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import DegenerateInputError, ParseError
from .exactcore import Vec3
from .geom import Line3, Point3, canonicalize_line
from .incidence import dedupe_lines, dedupe_points
from .poly3 import MultiPoly3

_SCALAR_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_scalar(tok: str, lineno: int) -> Fraction:
    if not _SCALAR_RE.match(tok):
        raise ParseError(f"bad scalar {tok!r} (integer or num/den expected)", lineno)
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {tok!r}", lineno) from None


def format_scalar(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_instance(text: str) -> tuple[list[Point3], list[Line3]]:
    points: list[Point3] = []
    lines: list[Line3] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        kind = toks[0]
        if kind == "point":
            if len(toks) != 4:
                raise ParseError("point record needs 3 scalars", lineno)
            x, y, z = (parse_scalar(t, lineno) for t in toks[1:])
            points.append(Point3(x, y, z))
        elif kind == "line":
            if len(toks) != 7:
                raise ParseError("line record needs 6 scalars", lineno)
            vals = [parse_scalar(t, lineno) for t in toks[1:]]
            try:
                lines.append(
                    canonicalize_line(Point3(*vals[:3]), Vec3(*vals[3:]))
                )
            except DegenerateInputError as e:
                raise ParseError(str(e), lineno) from None
        else:
            raise ParseError(f"unknown record kind {kind!r}", lineno)
    return dedupe_points(points), dedupe_lines(lines)


def serialize_instance(
    points,
    lines,
    predicted: dict[str, int] | None = None,
    header: str | None = None,
) -> str:
    out = []
    if header:
        out.append(f"# {header}")
    if predicted:
        for key, value in predicted.items():
            out.append(f"# predicted: {key} {value}")
    for a in dedupe_points(points):
        out.append(f"point {format_scalar(a.x)} {format_scalar(a.y)} {format_scalar(a.z)}")
    for ln in dedupe_lines(lines):
        anchor = ln.anchor
        d = ln.direction
        out.append(
            "line "
            f"{format_scalar(anchor.x)} {format_scalar(anchor.y)} {format_scalar(anchor.z)} "
            f"{d[0]} {d[1]} {d[2]}"
        )
    return "\n".join(out) + ("\n" if out else "")


def parse_poly(text: str) -> MultiPoly3:
    terms: dict[tuple[int, int, int], Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        if toks[0] != "term" or len(toks) != 5:
            raise ParseError("expected `term coef i j k`", lineno)
        coef = parse_scalar(toks[1], lineno)
        if coef == 0:
            raise ParseError("zero coefficient rejected", lineno)
        try:
            expo = tuple(int(t) for t in toks[2:])
        except ValueError:
            raise ParseError("exponents must be integers", lineno) from None
        if any(e < 0 for e in expo):
            raise ParseError("exponents must be nonnegative", lineno)
        if expo in terms:
            raise ParseError(f"duplicate exponent triple {expo}", lineno)
        terms[expo] = coef
    return MultiPoly3(terms)


def serialize_poly(p: MultiPoly3) -> str:
    out = [
        f"term {format_scalar(c)} {i} {j} {k}" for (i, j, k), c in p.sorted_terms()
    ]
    return "\n".join(out) + ("\n" if out else "")
