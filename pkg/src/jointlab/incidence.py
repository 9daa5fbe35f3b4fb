"""Incidence structures on finite point/line sets.

Joints, exact incidence counts, multiplicity histograms, plane richness, and
minimum plane covers.  Everything here is exact and brute-force at desk
scale: joint enumeration is O(n^2) pairwise intersections, plane richness is
the documented O(m^3) pair-bucket scan with a hard ceiling of 200 points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

from .errors import PreconditionError
from .exactcore import Mat, rank
from .geom import (
    Line3,
    Plane3,
    Point3,
    line_in_plane,
    line_intersection,
    plane_from_point_normal,
    point_on_line,
)

RICHEST_PLANE_POINT_LIMIT = 200


def dedupe_points(points) -> list[Point3]:
    return sorted(set(points), key=Point3.sort_key)


def dedupe_lines(lines) -> list[Line3]:
    return sorted(set(lines), key=Line3.sort_key)


@dataclass
class IncidenceStructure:
    points: list[Point3]
    lines: list[Line3]
    incident_lines: list[list[int]]  # per point, sorted indices into lines

    @property
    def mu(self) -> list[int]:
        return [len(ls) for ls in self.incident_lines]

    @property
    def nu(self) -> list[int]:
        counts = [0] * len(self.lines)
        for ls in self.incident_lines:
            for li in ls:
                counts[li] += 1
        return counts

    @property
    def incidences(self) -> int:
        return sum(len(ls) for ls in self.incident_lines)


def build(points, lines) -> IncidenceStructure:
    pts = dedupe_points(points)
    lns = dedupe_lines(lines)
    incident = [
        sorted(li for li, ln in enumerate(lns) if point_on_line(a, ln)) for a in pts
    ]
    return IncidenceStructure(pts, lns, incident)


def joints(lines) -> list[Point3]:
    """Points incident to at least three lines with some non-coplanar triple."""
    lns = dedupe_lines(lines)
    candidates: set[Point3] = set()
    for i, j in combinations(range(len(lns)), 2):
        hit = line_intersection(lns[i], lns[j])
        if isinstance(hit, Point3):
            candidates.add(hit)
    out = []
    for a in sorted(candidates, key=Point3.sort_key):
        dirs = [ln.direction for ln in lns if point_on_line(a, ln)]
        if len(dirs) >= 3 and rank(Mat(dirs)) == 3:
            out.append(a)
    return out


@dataclass
class MultiplicityHistogram:
    m_ge: dict[int, int]  # k -> number of points with mu >= k
    i_ge: dict[int, int]  # k -> incidences at those points

    @property
    def max_k(self) -> int:
        return max(self.m_ge, default=0)


def histogram(s: IncidenceStructure) -> MultiplicityHistogram:
    mus = s.mu
    kmax = max(mus, default=0)
    m_ge = {}
    i_ge = {}
    for k in range(1, kmax + 1):
        m_ge[k] = sum(1 for v in mus if v >= k)
        i_ge[k] = sum(v for v in mus if v >= k)
    return MultiplicityHistogram(m_ge, i_ge)


@dataclass
class Cor13Row:
    k: int
    m_ge: int
    i_ge: int
    low_range: bool  # k <= n^(1/3)
    m_bound_holds: bool  # against the constant-1 reading, reported only
    i_bound_holds: bool


def cor13_report(hist: MultiplicityHistogram, n: int) -> list[Cor13Row]:
    """Per-k comparison with the multiplicity bounds at constant 1 (reported, never asserted)."""
    rows = []
    for k in range(1, hist.max_k + 1):
        m = hist.m_ge[k]
        i = hist.i_ge[k]
        low = k**3 <= n
        if low:
            m_holds = m * m * k**3 <= n**3
            i_holds = i * i * k <= n**3
        else:
            m_holds = Fraction(m) <= Fraction(n**2, k**3) + Fraction(n, k)
            i_holds = Fraction(i) <= Fraction(n**2, k**2) + n
        rows.append(Cor13Row(k, m, i, low, m_holds, i_holds))
    return rows


@dataclass
class PlaneRichness:
    plane: Plane3 | None
    count: int
    degenerate: bool  # fewer than 3 points, or all points collinear


def richest_plane(points) -> PlaneRichness:
    """A plane holding the most points, by exhausting planes spanned by point triples."""
    pts = dedupe_points(points)
    m = len(pts)
    if m > RICHEST_PLANE_POINT_LIMIT:
        raise PreconditionError(
            f"richest_plane is cubic in the point count; refusing {m} > {RICHEST_PLANE_POINT_LIMIT}"
        )
    if m < 3:
        return PlaneRichness(None, m, True)
    # Integer-scale once so the inner loop stays on machine/big ints.
    denom = 1
    for a in pts:
        denom = lcm(denom, a.x.denominator, a.y.denominator, a.z.denominator)
    P = [(int(a.x * denom), int(a.y * denom), int(a.z * denom)) for a in pts]
    best: tuple[int, Plane3] | None = None
    found_plane = False
    for i in range(m):
        xi, yi, zi = P[i]
        for j in range(i + 1, m):
            dx, dy, dz = P[j][0] - xi, P[j][1] - yi, P[j][2] - zi
            buckets: dict[tuple[int, int, int], int] = {}
            collinear = 0
            for k in range(m):
                if k == i or k == j:
                    continue
                wx, wy, wz = P[k][0] - xi, P[k][1] - yi, P[k][2] - zi
                nx = dy * wz - dz * wy
                ny = dz * wx - dx * wz
                nz = dx * wy - dy * wx
                if nx == 0 and ny == 0 and nz == 0:
                    collinear += 1
                    continue
                g = gcd(gcd(abs(nx), abs(ny)), abs(nz))
                nx //= g
                ny //= g
                nz //= g
                if nx < 0 or (nx == 0 and (ny < 0 or (ny == 0 and nz < 0))):
                    nx, ny, nz = -nx, -ny, -nz
                key = (nx, ny, nz)
                buckets[key] = buckets.get(key, 0) + 1
            for key, cnt in buckets.items():
                found_plane = True
                total = cnt + 2 + collinear
                if best is None or total > best[0]:
                    best = (total, plane_from_point_normal(pts[i], key))
                elif total == best[0]:
                    cand = plane_from_point_normal(pts[i], key)
                    if cand.sort_key() < best[1].sort_key():
                        best = (total, cand)
    if not found_plane:
        return PlaneRichness(None, m, True)  # all points collinear
    return PlaneRichness(best[1], best[0], False)


def max_lines_in_plane(lines) -> tuple[int, Plane3 | None]:
    """The largest number of the given lines contained in a single plane."""
    lns = dedupe_lines(lines)
    n = len(lns)
    if n == 0:
        return 0, None
    if n == 1:
        return 1, None
    seen: set[Plane3] = set()
    best_count = 1
    best_plane: Plane3 | None = None
    for i, j in combinations(range(n), 2):
        plane = _plane_of_line_pair(lns[i], lns[j])
        if plane is None or plane in seen:
            continue
        seen.add(plane)
        cnt = sum(1 for ln in lns if line_in_plane(ln, plane))
        if cnt > best_count or (
            cnt == best_count
            and best_plane is not None
            and plane.sort_key() < best_plane.sort_key()
        ):
            best_count, best_plane = cnt, plane
    return best_count, best_plane


def _plane_of_line_pair(l1: Line3, l2: Line3) -> Plane3 | None:
    d1, d2 = l1.direction, l2.direction
    n = (
        d1[1] * d2[2] - d1[2] * d2[1],
        d1[2] * d2[0] - d1[0] * d2[2],
        d1[0] * d2[1] - d1[1] * d2[0],
    )
    if n != (0, 0, 0):
        # the only plane that could contain both runs through l1 with normal n
        plane = plane_from_point_normal(l1.anchor, n)
        return plane if line_in_plane(l2, plane) else None  # else skew
    # parallel distinct lines span a plane through both anchors
    w = l2.anchor.as_vec() - l1.anchor.as_vec()
    d = Fraction(d1[0]), Fraction(d1[1]), Fraction(d1[2])
    nx = d[1] * w.z - d[2] * w.y
    ny = d[2] * w.x - d[0] * w.z
    nz = d[0] * w.y - d[1] * w.x
    if nx == 0 and ny == 0 and nz == 0:
        return None  # identical lines (deduped earlier, defensive)
    return plane_from_point_normal(l1.anchor, (nx, ny, nz))


def plane_cover(a: Point3, incident_lines) -> int:
    """Minimum number of planes through `a` covering all the given lines."""
    lns = dedupe_lines(incident_lines)
    for ln in lns:
        if not point_on_line(a, ln):
            raise PreconditionError(f"line {ln} does not pass through {a}")
    n = len(lns)
    if n <= 1:
        return n
    coverage: set[frozenset[int]] = set()
    for i, j in combinations(range(n), 2):
        d1, d2 = lns[i].direction, lns[j].direction
        normal = (
            d1[1] * d2[2] - d1[2] * d2[1],
            d1[2] * d2[0] - d1[0] * d2[2],
            d1[0] * d2[1] - d1[1] * d2[0],
        )
        # distinct lines through a common point always span a plane
        members = frozenset(
            k
            for k, ln in enumerate(lns)
            if normal[0] * ln.direction[0]
            + normal[1] * ln.direction[1]
            + normal[2] * ln.direction[2]
            == 0
        )
        coverage.add(members)
    maximal = [s for s in coverage if not any(s < t for t in coverage)]
    maximal.sort(key=sorted)
    universe = frozenset(range(n))
    for size in range(1, n + 1):
        for combo in combinations(maximal, size):
            merged = frozenset().union(*combo)
            if merged == universe:
                return size
    raise AssertionError("pair-spanned planes always cover all lines")


def plane_cover_sum(s: IncidenceStructure) -> int:
    total = 0
    for pi, a in enumerate(s.points):
        lns = [s.lines[li] for li in s.incident_lines[pi]]
        total += plane_cover(a, lns)
    return total


@dataclass
class ConditionReport:
    """Outcome of the point/line hypotheses shared by the traced theorems."""

    b: Fraction
    n: int
    holds_plane_richness: bool
    holds_min_multiplicity: bool
    richest: PlaneRichness | None
    min_mu_witness: tuple[Point3, int] | None = None

    @property
    def all_hold(self) -> bool:
        return self.holds_plane_richness and self.holds_min_multiplicity


def check_conditions(s: IncidenceStructure, b) -> ConditionReport:
    """(i) no plane holds more than b*n points; (ii) every point has mu >= 3."""
    b = Fraction(b)
    n = len(s.lines)
    witness = None
    for pi, a in enumerate(s.points):
        m = len(s.incident_lines[pi])
        if m < 3 and (witness is None or m < witness[1]):
            witness = (a, m)
    rich = richest_plane(s.points) if s.points else PlaneRichness(None, 0, True)
    holds_i = Fraction(rich.count) <= b * n
    return ConditionReport(b, n, holds_i, witness is None, rich, witness)
