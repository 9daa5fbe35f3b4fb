"""Exact rational scalars, 3-vectors, matrices, and fraction-free linear algebra.

Every predicate in the package runs on `fractions.Fraction`, which already
guarantees the canonical form we need (reduced, positive denominator,
canonical zero 0/1).  Elimination is fraction-free (Bareiss) on rows scaled
to primitive integers, with a fixed pivoting rule, so nullspace bases are
reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DegenerateInputError, ShapeError

Rat = Fraction


def rat(value) -> Fraction:
    """Coerce an int / string ('3', '-2/5') / Fraction to Fraction."""
    return Fraction(value)


@dataclass(frozen=True)
class Vec3:
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

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scale(self, k) -> "Vec3":
        k = Fraction(k)
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> Fraction:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0 and self.z == 0

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z)


def primitive_integer(values: Sequence, positive_first: bool = True) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers.

    The result spans the same ray/line; with positive_first the first nonzero
    entry is made positive, which is the canonical representative used for
    line directions, plane normals, and nullspace vectors.
    """
    fracs = [Fraction(v) for v in values]
    if all(f == 0 for f in fracs):
        raise DegenerateInputError("cannot normalize the zero vector")
    denom = lcm(*(f.denominator for f in fracs))
    ints = [int(f * denom) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    if positive_first:
        for v in ints:
            if v != 0:
                if v < 0:
                    ints = [-w for w in ints]
                break
    return tuple(ints)


class Mat:
    """Dense rational matrix, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable]):
        rows = [[Fraction(v) for v in row] for row in entries]
        if not rows:
            raise ShapeError("matrix needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged rows")
        self.rows = len(rows)
        self.cols = width
        self.entries = rows

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        r, c = rc
        return self.entries[r][c]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"Mat({self.entries!r})"

    def mul_vec(self, v: Sequence) -> list[Fraction]:
        if len(v) != self.cols:
            raise ShapeError("vector length != cols")
        vv = [Fraction(x) for x in v]
        return [sum((row[c] * vv[c] for c in range(self.cols)), Fraction(0)) for row in self.entries]


def det3(m: Mat) -> Fraction:
    if m.rows != 3 or m.cols != 3:
        raise ShapeError("det3 expects a 3x3 matrix")
    a = m.entries
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def det4(m: Mat) -> Fraction:
    if m.rows != 4 or m.cols != 4:
        raise ShapeError("det4 expects a 4x4 matrix")
    a = m.entries
    total = Fraction(0)
    sign = 1
    for c in range(4):
        minor = Mat([[a[r][cc] for cc in range(4) if cc != c] for r in range(1, 4)])
        if a[0][c] != 0:
            total += sign * a[0][c] * det3(minor)
        sign = -sign
    return total


def _primitive_rows(m: Mat) -> list[list[int]]:
    # Row scaling preserves the nullspace and pivot structure.
    out = []
    for row in m.entries:
        if all(v == 0 for v in row):
            out.append([0] * m.cols)
            continue
        denom = lcm(*(v.denominator for v in row))
        ints = [int(v * denom) for v in row]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        out.append([v // g for v in ints])
    return out


def _bareiss_echelon(rows: list[list[int]], cols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free forward elimination.

    Pivot rule: for each column left to right, the first row (top to bottom
    among unresolved rows) with a nonzero entry.  Returns the echelon rows
    and the pivot column indices.
    """
    nrows = len(rows)
    pivot_cols: list[int] = []
    piv = 0
    prev = 1
    for col in range(cols):
        pr = None
        for r in range(piv, nrows):
            if rows[r][col] != 0:
                pr = r
                break
        if pr is None:
            continue
        if pr != piv:
            rows[piv], rows[pr] = rows[pr], rows[piv]
        p = rows[piv][col]
        for r in range(piv + 1, nrows):
            factor = rows[r][col]
            # The division by the previous pivot is exact (entries are minors);
            # it must be applied even when factor == 0 to keep that invariant.
            for c in range(col, cols):
                rows[r][c] = (p * rows[r][c] - factor * rows[piv][c]) // prev
        prev = p
        pivot_cols.append(col)
        piv += 1
        if piv == nrows:
            break
    return rows, pivot_cols


def rank(m: Mat) -> int:
    rows = _primitive_rows(m)
    _, pivots = _bareiss_echelon(rows, m.cols)
    return len(pivots)


def nullspace(m: Mat) -> list[tuple[int, ...]]:
    """Canonical basis of the right nullspace.

    One vector per free column (ascending), each scaled to primitive
    integers with positive first nonzero entry.
    """
    rows = _primitive_rows(m)
    ech, pivots = _bareiss_echelon(rows, m.cols)
    pivot_set = set(pivots)
    free_cols = [c for c in range(m.cols) if c not in pivot_set]
    basis: list[tuple[int, ...]] = []
    for f in free_cols:
        v: list[Fraction] = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        # Back-substitute pivot coordinates from the echelon rows.
        for i in range(len(pivots) - 1, -1, -1):
            pc = pivots[i]
            row = ech[i]
            s = sum((Fraction(row[c]) * v[c] for c in range(pc + 1, m.cols) if v[c] != 0), Fraction(0))
            v[pc] = -s / row[pc]
        basis.append(primitive_integer(v))
    return basis
