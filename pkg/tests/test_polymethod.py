import random
from fractions import Fraction
from math import comb

import pytest

from helpers import axis, grid_points, random_poly
from jointlab import polymethod as pm
from jointlab.errors import PreconditionError
from jointlab.exactcore import Mat, Vec3, nullspace
from jointlab.geom import Point3, canonicalize_line
from jointlab.poly3 import MultiPoly3, gradient, restrict_to_line, taylor2, variables

x, y, z = variables()
xyz = x * y * z
paraboloid = z - x * y
cone = x * x + y * y - z * z

# orthogonal rational rotation built from the (3,4,5) and (5,12,13) triples
ROTATION = [
    [Fraction(3, 5), Fraction(4, 5), Fraction(0)],
    [Fraction(-4, 13), Fraction(3, 13), Fraction(12, 13)],
    [Fraction(48, 65), Fraction(-36, 65), Fraction(5, 13)],
]


# -- fitting -----------------------------------------------------------------


def test_fit_three_points_gives_plane():
    p = pm.fit_vanishing_poly([Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)])
    assert p == z


def test_fit_empty_gives_constant_one():
    assert pm.fit_vanishing_poly([]) == MultiPoly3.constant(1)


def test_fit_grid27_degree_exactly_three():
    pts = grid_points(3)
    p = pm.fit_vanishing_poly(pts)
    assert p.degree == 3
    assert all(p.eval(a) == 0 for a in pts)
    # independent oracle: evaluation-matrix nullspaces at d = 2 and d = 3
    for d, expect_nontrivial in ((2, False), (3, True)):
        monos = pm.monomials_upto(d)
        rows = [
            [a.x**i * a.y**j * a.z**k for (i, j, k) in monos] for a in pts
        ]
        assert bool(nullspace(Mat(rows))) == expect_nontrivial


def test_fit_deterministic():
    pts = grid_points(3)
    assert pm.fit_vanishing_poly(pts) == pm.fit_vanishing_poly(list(reversed(pts)))


def test_fit_respects_prop5_bound_random():
    rng = random.Random(77)
    for _ in range(25):
        m = rng.randint(1, 25)
        pts = {
            Point3(rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(-4, 4))
            for _ in range(m)
        }
        p = pm.fit_vanishing_poly(sorted(pts, key=Point3.sort_key))
        assert not p.is_zero()
        assert p.degree <= pm.prop5_degree_bound(len(pts))
        assert all(p.eval(a) == 0 for a in pts)


def test_prop5_degree_bound_values():
    assert pm.prop5_degree_bound(0) == 0
    assert pm.prop5_degree_bound(3) == 1  # C(4,3) = 4 > 3
    assert pm.prop5_degree_bound(27) == 3  # C(5,3) = 10, C(6,3) = 20, C(7,3) = 35
    for m in range(0, 80):
        d = pm.prop5_degree_bound(m)
        assert comb(d + 3, 3) > m
        assert d == 0 or comb(d + 2, 3) <= m


# -- flatness polynomials ------------------------------------------------------


def test_flatness_polys_examples():
    p1, p2, p3 = pm.flatness_polys(paraboloid)
    assert p1.is_zero() and p2.is_zero()
    assert p3 == (x * y).scale(2)

    assert all(q.is_zero() for q in pm.flatness_polys(z))

    sphere = x * x + y * y + z * z - 1
    pis = pm.flatness_polys(sphere)
    assert all(not q.is_zero() for q in pis)
    assert all(q.degree <= 2 for q in pis)

    with pytest.raises(PreconditionError):
        pm.flatness_polys(MultiPoly3.constant(3))


def test_flatness_degree_bound_random():
    rng = random.Random(88)
    for _ in range(40):
        d = rng.randint(2, 8)
        p = random_poly(rng, d, terms=7)
        for q in pm.flatness_polys(p):
            assert q.is_zero() or q.degree <= 3 * d - 4


# -- point classification -------------------------------------------------------


def test_classify_point_examples():
    assert pm.classify_point(xyz, Point3(0, 0, 1)).kind == pm.CRITICAL
    cls = pm.classify_point(xyz, Point3(1, 2, 0))
    assert cls.kind == pm.FLAT
    assert cls.grad == (0, 0, 2)

    cls = pm.classify_point(paraboloid, Point3(0, 0, 0))
    assert cls.kind == pm.REGULAR_NONFLAT
    assert cls.pi_values == (0, 0, 0)  # the documented frame degeneracy
    assert cls.tangent_entries is not None and cls.tangent_entries[1] == -1
    assert cls.frame_degenerate

    assert pm.classify_point(xyz, Point3(1, 1, 1)).kind == pm.OFF_SURFACE


def test_rotated_frame_agrees_with_tangent_verdict():
    # conjugating by a rational rotation removes the frame degeneracy at the
    # origin of z - xy: the rotated flatness values become nonzero, matching
    # the tangent-basis verdict
    r_t = [[ROTATION[j][i] for j in range(3)] for i in range(3)]
    prod = [
        [
            sum(ROTATION[i][k] * r_t[k][j] for k in range(3))
            for j in range(3)
        ]
        for i in range(3)
    ]
    assert prod == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    rotated = paraboloid.compose_linear(ROTATION)
    cls = pm.classify_point(rotated, Point3(0, 0, 0))
    assert cls.kind == pm.REGULAR_NONFLAT
    assert not cls.frame_degenerate
    assert any(v != 0 for v in cls.pi_values)


def test_pi_tangent_equivalence_at_nondegenerate_points():
    rng = random.Random(101)
    checked = 0
    while checked < 60:
        p = random_poly(rng, rng.randint(2, 5), terms=6)
        a = Point3(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        p = p - MultiPoly3.constant(p.eval(a))  # force a onto the zero set
        cls = pm.classify_point(p, a)
        if cls.kind == pm.CRITICAL or cls.frame_degenerate:
            continue
        checked += 1
        assert (cls.kind == pm.FLAT) == all(v == 0 for v in cls.pi_values)


def test_pi_tangent_equivalence_on_flat_plane_points():
    # points of a plane factor are flat; the gradient there is parallel to the
    # plane normal, so choosing a generic normal keeps the frame non-degenerate
    rng = random.Random(55)
    for _ in range(20):
        g = random_poly(rng, rng.randint(1, 3), terms=4)
        lin = x + y.scale(2) + z.scale(3) - 1
        a = Point3(1, Fraction(3), Fraction(-2))  # on lin: 1 + 6 - 6 - 1 = 0
        if lin.eval(a) != 0:
            continue
        p = lin * (g - MultiPoly3.constant(g.eval(a)) + MultiPoly3.constant(1))
        cls = pm.classify_point(p, a)
        assert cls.kind == pm.FLAT
        assert all(v == 0 for v in cls.pi_values)
        assert not cls.frame_degenerate


# -- product identities (reducible polynomials) ---------------------------------


def test_flatness_product_identity():
    rng = random.Random(202)
    done = 0
    while done < 40:
        f = random_poly(rng, rng.randint(1, 4), terms=5)
        g = random_poly(rng, rng.randint(1, 4), terms=5)
        a = Point3(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        f = f - MultiPoly3.constant(f.eval(a))
        if f.is_zero() or f.degree < 1 or g.eval(a) == 0 or (f * g).degree < 1:
            continue
        done += 1
        pis_fg = [q.eval(a) for q in pm.flatness_polys(f * g)]
        pis_f = [q.eval(a) for q in pm.flatness_polys(f)]
        ga = g.eval(a)
        assert pis_fg == [ga**3 * v for v in pis_f]


def test_gradient_product_identity():
    rng = random.Random(203)
    done = 0
    while done < 40:
        f = random_poly(rng, rng.randint(1, 4), terms=5)
        g = random_poly(rng, rng.randint(1, 4), terms=5)
        a = Point3(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        f = f - MultiPoly3.constant(f.eval(a))
        if f.is_zero() or g.eval(a) == 0:
            continue
        done += 1
        ga = g.eval(a)
        grad_fg = [q.eval(a) for q in gradient(f * g)]
        grad_f = [q.eval(a) for q in gradient(f)]
        assert grad_fg == [ga * v for v in grad_f]


# -- line classification ---------------------------------------------------------


def face_line(anchor, direction):
    return canonicalize_line(Point3(*anchor), Vec3(*direction))


def test_classify_line_examples():
    assert pm.classify_line(xyz, axis(0)).kind == pm.CRITICAL_LINE
    assert pm.classify_line(xyz, face_line((0, 1, 0), (1, 0, 0))).kind == pm.FLAT_LINE
    assert pm.classify_line(paraboloid, axis(0)).kind == pm.ORDINARY_ON_SURFACE
    assert pm.classify_line(paraboloid, axis(2)).kind == pm.CROSSING


def test_sufficient_count_rules_agree_with_exact_rules():
    d = int(xyz.degree)
    # a line classified critical has d+1 critical sample points, and conversely
    for line, expected in (
        (axis(0), pm.CRITICAL_LINE),
        (face_line((0, 1, 0), (1, 0, 0)), pm.FLAT_LINE),
    ):
        kinds = [
            pm.classify_point(xyz, line.point_at(t)).kind for t in range(1, 3 * d - 2)
        ]
        if expected == pm.CRITICAL_LINE:
            assert kinds.count(pm.CRITICAL) >= d + 1
        else:
            assert kinds.count(pm.FLAT) >= 3 * d - 3
        assert pm.classify_line(xyz, line).kind == expected


def test_count_classified_lines_examples():
    lines = [axis(0), axis(1), axis(2)]
    faces = [
        face_line((0, 1, 0), (1, 0, 0)),
        face_line((1, 0, 0), (0, 1, 0)),
        face_line((0, 0, 1), (0, 1, 0)),
        face_line((0, 1, 0), (0, 0, 1)),
        face_line((0, 0, 1), (1, 0, 0)),
        face_line((1, 0, 0), (0, 0, 1)),
    ]
    census = pm.count_classified_lines(xyz, lines + faces)
    assert census.counts[pm.CRITICAL_LINE] == 3
    assert census.counts[pm.FLAT_LINE] == 6
    assert census.critical_bound == 6

    rulings = [
        canonicalize_line(Point3(0, i, 0), Vec3(1, 0, i)) for i in range(1, 6)
    ] + [canonicalize_line(Point3(j, 0, 0), Vec3(0, 1, j)) for j in range(1, 6)]
    census = pm.count_classified_lines(paraboloid, rulings)
    assert census.counts[pm.CRITICAL_LINE] == 0
    assert census.counts[pm.FLAT_LINE] == 0
    assert census.counts[pm.ORDINARY_ON_SURFACE] == 10

    cone_rulings = [
        canonicalize_line(Point3(0, 0, 0), Vec3(*d))
        for d in ((1, 0, 1), (0, 1, 1), (3, 4, 5), (4, 3, 5))
    ]
    census = pm.count_classified_lines(cone, cone_rulings)
    assert census.counts[pm.CRITICAL_LINE] == 0
    assert census.counts[pm.FLAT_LINE] == 0


def test_count_classified_rejects_non_squarefree():
    with pytest.raises(PreconditionError):
        pm.count_classified_lines(x * x, [axis(0)])


# -- tangent coplanarity ----------------------------------------------------------


def test_coplanarity_at_regular_examples():
    origin = Point3(0, 0, 0)
    in_plane = [
        axis(0),
        axis(1),
        canonicalize_line(origin, Vec3(1, 1, 0)),
    ]
    assert pm.coplanarity_at_regular(z, origin, in_plane)

    a = Point3(1, 1, 1)
    rulings = [
        canonicalize_line(a, Vec3(1, 0, 1)),
        canonicalize_line(a, Vec3(0, 1, 1)),
    ]
    assert pm.coplanarity_at_regular(paraboloid, a, rulings)

    with pytest.raises(PreconditionError):
        pm.coplanarity_at_regular(xyz, Point3(0, 0, 0), [axis(0)])  # critical point


def test_taylor_vanishes_on_tangent_directions_at_flat_points():
    a = Point3(1, 2, 0)  # flat for xyz, gradient (0, 0, 2)
    q = taylor2(xyz, a)
    for v in ((1, 0, 0), (0, 1, 0), (1, 1, 0), (2, -3, 0)):
        line = canonicalize_line(a, Vec3(*v))
        assert restrict_to_line(q, line).is_zero()


# -- census over a surface ----------------------------------------------------------


def test_prop12_census_paraboloid():
    rulings = [
        canonicalize_line(Point3(0, i, 0), Vec3(1, 0, i)) for i in range(1, 4)
    ] + [canonicalize_line(Point3(j, 0, 0), Vec3(0, 1, j)) for j in range(1, 4)]
    census = pm.prop12_census(paraboloid, rulings)
    assert census.points == []
    assert census.incidences == 0
    assert census.nd == 6 * 2 and census.d_cubed == 8


def test_prop12_census_cone_apex():
    rulings = [
        canonicalize_line(Point3(0, 0, 0), Vec3(*d))
        for d in ((1, 0, 1), (0, 1, 1), (3, 4, 5), (4, 3, 5))
    ]
    census = pm.prop12_census(cone, rulings)
    assert census.points == [Point3(0, 0, 0)]
    assert census.incidences == 4


def test_prop12_census_empty_lines():
    census = pm.prop12_census(cone, [])
    assert census.points == [] and census.incidences == 0


def test_prop12_rejects_linear_factors():
    with pytest.raises(PreconditionError):
        pm.prop12_census(z * (z - x * y), [axis(0)])
