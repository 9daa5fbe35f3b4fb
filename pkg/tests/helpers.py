"""Shared builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from jointlab.exactcore import Vec3
from jointlab.geom import Line3, Point3, canonicalize_line, line_through
from jointlab.poly3 import MultiPoly3


def axis(i: int) -> Line3:
    d = [0, 0, 0]
    d[i] = 1
    return canonicalize_line(Point3(0, 0, 0), Vec3(*d))


def grid_lines(k: int) -> list[Line3]:
    out = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            out.append(canonicalize_line(Point3(0, i, j), Vec3(1, 0, 0)))
            out.append(canonicalize_line(Point3(i, 0, j), Vec3(0, 1, 0)))
            out.append(canonicalize_line(Point3(i, j, 0), Vec3(0, 0, 1)))
    return out


def grid_points(k: int) -> list[Point3]:
    return [
        Point3(a, b, c)
        for a in range(1, k + 1)
        for b in range(1, k + 1)
        for c in range(1, k + 1)
    ]


def random_point(rng: random.Random, lo: int = -5, hi: int = 5) -> Point3:
    return Point3(rng.randint(lo, hi), rng.randint(lo, hi), rng.randint(lo, hi))


def random_lines(rng: random.Random, n: int, lo: int = -5, hi: int = 5) -> list[Line3]:
    out = []
    seen = set()
    while len(out) < n:
        a = random_point(rng, lo, hi)
        b = random_point(rng, lo, hi)
        if a == b:
            continue
        ln = line_through(a, b)
        if ln not in seen:
            seen.add(ln)
            out.append(ln)
    return out


def random_poly(
    rng: random.Random,
    degree: int,
    terms: int = 8,
    coeff_range: tuple[int, int] = (-9, 9),
) -> MultiPoly3:
    """Random sparse polynomial of exactly the given total degree."""
    acc = {}
    # force a term of full degree so the degree is exact
    i = rng.randint(0, degree)
    j = rng.randint(0, degree - i)
    acc[(i, j, degree - i - j)] = Fraction(rng.choice([c for c in range(*coeff_range) if c]))
    for _ in range(terms - 1):
        d = rng.randint(0, degree)
        i = rng.randint(0, d)
        j = rng.randint(0, d - i)
        c = rng.randint(*coeff_range)
        if c:
            acc[(i, j, d - i - j)] = Fraction(c)
    return MultiPoly3(acc)
