"""Generators for the extremal configurations, each with exact predicted counts.

Every generator emits integer-coordinate points and lines plus a prediction
block; the invariant suite recounts each instance with the incidence module
and demands exact agreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateInputError
from .exactcore import Vec3
from .geom import Line3, Point3, canonicalize_line
from .incidence import dedupe_lines, dedupe_points


@dataclass
class GeneratedInstance:
    tag: str
    points: list[Point3]
    lines: list[Line3]
    predicted: dict[str, int]
    report: dict[str, object] = field(default_factory=dict)


def _line(px, py, pz, dx, dy, dz) -> Line3:
    return canonicalize_line(Point3(px, py, pz), Vec3(dx, dy, dz))


def gen_grid(k: int) -> GeneratedInstance:
    """Axis-parallel lines of the k x k x k lattice {1..k}^3.

    3k^2 lines, k^3 points, all joints of multiplicity exactly 3, 3k^3
    incidences.
    """
    if k < 1:
        raise DegenerateInputError("grid needs k >= 1")
    lines = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            lines.append(_line(0, i, j, 1, 0, 0))
            lines.append(_line(i, 0, j, 0, 1, 0))
            lines.append(_line(i, j, 0, 0, 0, 1))
    points = [
        Point3(a, b, c)
        for a in range(1, k + 1)
        for b in range(1, k + 1)
        for c in range(1, k + 1)
    ]
    predicted = {
        "num_lines": 3 * k * k,
        "num_points": k**3,
        "num_joints": k**3,
        "incidences": 3 * k**3,
    }
    return GeneratedInstance(f"grid k={k}", dedupe_points(points), dedupe_lines(lines), predicted)


def _st_points_lines(n: int):
    points = [
        Point3(px, py, 0) for px in range(1, n + 1) for py in range(1, 2 * n * n + 1)
    ]
    lines = [
        _line(0, b, 0, 1, a, 0) for a in range(1, n + 1) for b in range(1, n * n + 1)
    ]
    return points, lines


def gen_st_planar(n: int) -> GeneratedInstance:
    """Lattice points {1..N} x {1..2N^2} and lines y = ax + b in the plane z = 0.

    Slopes a in {1..N}, intercepts b in {1..N^2}: every line meets exactly N
    grid points, giving N^4 incidences between 2N^3 points and N^3 lines.
    """
    if n < 1:
        raise DegenerateInputError("planar construction needs N >= 1")
    points, lines = _st_points_lines(n)
    predicted = {
        "num_lines": n**3,
        "num_points": 2 * n**3,
        "num_joints": 0,
        "incidences": n**4,
    }
    return GeneratedInstance(
        f"st N={n}", dedupe_points(points), dedupe_lines(lines), predicted
    )


def _planar_multiplicity(px: int, py: int, n: int) -> int:
    # number of slopes a in {1..N} with 1 <= py - a*px <= N^2
    return sum(1 for a in range(1, n + 1) if 1 <= py - a * px <= n * n)


def gen_joint_lb_small(n: int) -> GeneratedInstance:
    """Planar construction plus one vertical line through each retained point.

    Points on fewer than two planar lines are dropped first; every retained
    point then sits on >= 2 planar lines and its vertical, so it is a joint.
    """
    if n < 1:
        raise DegenerateInputError("construction needs N >= 1")
    points, base_lines = _st_points_lines(n)
    kept = [a for a in points if _planar_multiplicity(int(a.x), int(a.y), n) >= 2]
    verticals = [canonicalize_line(a, Vec3(0, 0, 1)) for a in kept]
    base_incidences = sum(_planar_multiplicity(int(a.x), int(a.y), n) for a in kept)
    lines = dedupe_lines(base_lines + verticals)
    predicted = {
        "num_lines": len(lines),
        "num_points": len(kept),
        "num_joints": len(kept),
        "incidences": base_incidences + len(kept),
    }
    return GeneratedInstance(
        f"joint-lb-small N={n}", dedupe_points(kept), lines, predicted
    )


def gen_joint_lb_stacked(n: int, t: int) -> GeneratedInstance:
    """t stacked copies of the planar construction, plus verticals.

    The retained planar points are copied into the planes z = 0..t-1, each
    planar line is copied per level, and one vertical line goes through each
    level-0 point, turning every point into a joint.
    """
    if n < 1 or t < 1:
        raise DegenerateInputError("construction needs N >= 1 and t >= 1")
    base_points, base_lines = _st_points_lines(n)
    kept = [a for a in base_points if _planar_multiplicity(int(a.x), int(a.y), n) >= 2]
    mu_sum = sum(_planar_multiplicity(int(a.x), int(a.y), n) for a in kept)
    points = [
        Point3(a.x, a.y, lvl) for lvl in range(t) for a in kept
    ]
    lines = []
    for lvl in range(t):
        for a_slope in range(1, n + 1):
            for b in range(1, n * n + 1):
                lines.append(_line(0, b, lvl, 1, a_slope, 0))
    lines += [canonicalize_line(a, Vec3(0, 0, 1)) for a in kept]
    lines = dedupe_lines(lines)
    m1 = len(kept)
    num_points = t * m1
    incidences = t * mu_sum + t * m1
    predicted = {
        "num_lines": len(lines),
        "num_points": num_points,
        "num_joints": num_points,
        "incidences": incidences,
    }
    report: dict[str, object] = {}
    if num_points and len(lines):
        # trend quantity I / (m^(1/3) n), reported as its exact cube
        report["incidence_ratio_cubed"] = Fraction(
            incidences**3, num_points * len(lines) ** 3
        )
    return GeneratedInstance(
        f"joint-lb-stacked N={n} t={t}", dedupe_points(points), lines, predicted, report
    )


def gen_paraboloid(r: int) -> GeneratedInstance:
    """r + r rulings of z = xy and their r^2 cross-family intersections.

    Every point lies on exactly two lines, so the minimum-multiplicity
    hypothesis fails by design while the plane-richness one holds.
    """
    if r < 1:
        raise DegenerateInputError("construction needs r >= 1")
    lines = [_line(0, i, 0, 1, 0, i) for i in range(1, r + 1)]
    lines += [_line(j, 0, 0, 0, 1, j) for j in range(1, r + 1)]
    points = [
        Point3(j, i, i * j) for i in range(1, r + 1) for j in range(1, r + 1)
    ]
    predicted = {
        "num_lines": 2 * r,
        "num_points": r * r,
        "num_joints": 0,
        "incidences": 2 * r * r,
    }
    return GeneratedInstance(
        f"paraboloid r={r}", dedupe_points(points), dedupe_lines(lines), predicted
    )


def gen_bourgain_grid(k: int) -> GeneratedInstance:
    """The grid instance re-read against the rich-lines/thin-planes hypotheses.

    Reports the exact per-line point count (k) and the maximum number of
    lines in one plane (2k), plus whether each hypothesis holds in the
    constant-free reading count^2 vs n (constant multiples are allowed by
    the source, so shortfalls are reported, not errors).
    """
    if k < 1:
        raise DegenerateInputError("grid needs k >= 1")
    base = gen_grid(k)
    n = base.predicted["num_lines"]
    per_line = k
    max_plane_lines = 2 * k if k >= 1 else 0
    report = {
        "per_line_points": per_line,
        "max_plane_lines": max_plane_lines,
        "rich_lines_holds": per_line * per_line >= n,
        "thin_planes_holds": max_plane_lines * max_plane_lines <= n,
        "n": n,
    }
    return GeneratedInstance(
        f"bourgain-grid k={k}", base.points, base.lines, dict(base.predicted), report
    )


GENERATORS = {
    "grid": gen_grid,
    "st": gen_st_planar,
    "joint-lb-small": gen_joint_lb_small,
    "joint-lb-stacked": gen_joint_lb_stacked,
    "paraboloid": gen_paraboloid,
    "bourgain": gen_bourgain_grid,
}
