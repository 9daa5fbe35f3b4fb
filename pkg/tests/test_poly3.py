import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import axis, random_poly
from jointlab.errors import DegenerateInputError, PreconditionError
from jointlab.exactcore import Vec3
from jointlab.geom import Plane3, Point3, canonicalize_line
from jointlab.poly3 import (
    NEG_INF,
    MultiPoly3,
    UniPoly,
    divexact,
    gradient,
    hessian,
    linear_factors,
    mpoly_gcd,
    plane_poly,
    rational_roots,
    resultant_x,
    restrict_to_line,
    squarefree_part,
    taylor2,
    vanishes_on_line,
    variables,
)

x, y, z = variables()


# -- ring operations -------------------------------------------------------


def test_eval_examples():
    assert (x * y * z).eval((1, 2, 3)) == 6
    assert (z - x * y).eval((2, 3, 6)) == 0
    assert (x + y) * (x - y) == x * x - y * y


def test_zero_polynomial_degree_sentinel():
    assert MultiPoly3().degree == NEG_INF
    assert NEG_INF < -(10**9)
    assert (x - x).is_zero()


def test_scalar_mixing():
    assert 2 * x + x == x.scale(3)
    assert (x + 1) - 1 == x
    assert x**0 == MultiPoly3.constant(1)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_ring_identities(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    f = random_poly(rng, rng.randint(0, 4), terms=5)
    g = random_poly(rng, rng.randint(0, 4), terms=5)
    h = random_poly(rng, rng.randint(0, 3), terms=4)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    pt = (rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
    assert (f * g).eval(pt) == f.eval(pt) * g.eval(pt)


# -- calculus ---------------------------------------------------------------


def test_gradient_examples():
    g = gradient(z - x * y)
    assert g == (-y, -x, MultiPoly3.constant(1))
    assert gradient(MultiPoly3.constant(5)) == (
        MultiPoly3(),
        MultiPoly3(),
        MultiPoly3(),
    )


def test_hessian_example():
    H = hessian(z - x * y)
    minus_one = MultiPoly3.constant(-1)
    for r in range(3):
        for c in range(3):
            expected = minus_one if {r, c} == {0, 1} else MultiPoly3()
            assert H[r][c] == expected


def test_hessian_symmetry_random():
    rng = random.Random(99)
    for _ in range(100):
        p = random_poly(rng, rng.randint(1, 6), terms=7)
        H = hessian(p)
        for r in range(3):
            for c in range(r + 1, 3):
                assert H[r][c] == H[c][r]


def test_gradient_product_rule_random():
    rng = random.Random(17)
    for _ in range(40):
        f = random_poly(rng, rng.randint(1, 4), terms=5)
        g = random_poly(rng, rng.randint(1, 4), terms=5)
        gf, gg, gp = gradient(f), gradient(g), gradient(f * g)
        for i in range(3):
            assert gp[i] == f * gg[i] + g * gf[i]


# -- restriction to lines ---------------------------------------------------


def test_restrict_examples():
    diag = canonicalize_line(Point3(0, 0, 0), Vec3(1, 1, 1))
    assert restrict_to_line(z - x * y, diag) == UniPoly([0, 1, -1])
    assert restrict_to_line(z, axis(0)).is_zero()
    sphere = x * x + y * y + z * z - 1
    assert restrict_to_line(sphere, axis(2)) == UniPoly([-1, 0, 1])


def test_restrict_agrees_with_eval():
    rng = random.Random(23)
    for _ in range(20):
        p = random_poly(rng, rng.randint(1, 5), terms=6)
        a = Point3(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        d = Vec3(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        if d.is_zero():
            continue
        line = canonicalize_line(a, d)
        r = restrict_to_line(p, line)
        for _ in range(10):
            t = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
            assert r.eval(t) == p.eval(line.point_at(t))


def test_vanishes_on_line_examples():
    ruling = canonicalize_line(Point3(0, 0, 0), Vec3(1, 0, 0))
    assert vanishes_on_line(z - x * y, ruling)
    assert not vanishes_on_line(z - x * y, axis(2))
    assert vanishes_on_line(MultiPoly3(), axis(0))


def test_vanishes_agrees_with_sampling_oracle():
    # a polynomial vanishing at deg+1 distinct points of a line vanishes on it
    rng = random.Random(41)
    for _ in range(25):
        p = random_poly(rng, rng.randint(1, 5), terms=6)
        line = canonicalize_line(
            Point3(rng.randint(-2, 2), rng.randint(-2, 2), rng.randint(-2, 2)),
            Vec3(1, rng.randint(-2, 2), rng.randint(-2, 2)),
        )
        d = int(p.degree)
        samples_zero = all(p.eval(line.point_at(t)) == 0 for t in range(d + 1))
        assert vanishes_on_line(p, line) == samples_zero


# -- gcd / square-free ------------------------------------------------------


def test_squarefree_examples():
    assert squarefree_part(x * x) == x
    assert squarefree_part((x + y) * (x + y) * z) == (x + y) * z
    p = z - x * y
    assert squarefree_part(p) == p
    with pytest.raises(DegenerateInputError):
        squarefree_part(MultiPoly3())


def test_squarefree_idempotent_and_degree_bounded():
    rng = random.Random(71)
    for _ in range(25):
        f = random_poly(rng, rng.randint(1, 3), terms=4)
        g = random_poly(rng, rng.randint(1, 2), terms=3)
        if f.is_zero() or g.is_zero():
            continue
        p = f * f * g
        s = squarefree_part(p)
        assert s.degree <= p.degree
        assert squarefree_part(s) == s
        # same vanishing behavior spot-checked on sample points
        for _ in range(8):
            pt = (rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(-4, 4))
            assert (p.eval(pt) == 0) == (s.eval(pt) == 0) or g.eval(pt) == 0 or f.eval(pt) == 0


def test_gcd_recovers_common_factor():
    rng = random.Random(5)
    for _ in range(15):
        h = random_poly(rng, rng.randint(1, 2), terms=3)
        u = random_poly(rng, rng.randint(1, 2), terms=3)
        v = random_poly(rng, rng.randint(1, 2), terms=3)
        if h.is_zero() or u.is_zero() or v.is_zero():
            continue
        g = mpoly_gcd(h * u, h * v)
        # h divides the gcd of (hu, hv)
        assert divexact(g, mpoly_gcd(g, h)) is not None
        assert mpoly_gcd(g, h).degree >= h.degree - max(mpoly_gcd(u, v).degree, 0)


def test_divexact_roundtrip():
    rng = random.Random(7)
    for _ in range(25):
        f = random_poly(rng, rng.randint(0, 3), terms=4)
        g = random_poly(rng, rng.randint(0, 3), terms=4)
        if g.is_zero():
            continue
        q = divexact(f * g, g)
        assert q == f
    assert divexact(x * x + y, x) is None


# -- linear factors ---------------------------------------------------------


def test_linear_factors_examples():
    planes, residual = linear_factors(z * (z - x * y))
    assert planes == [Plane3((0, 0, 1), 0)]
    assert residual == z - x * y

    planes, residual = linear_factors(x * y * z)
    assert {pl.normal for pl in planes} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert residual.degree == 0

    planes, residual = linear_factors(z - x * y)
    assert planes == []
    assert residual == z - x * y

    with pytest.raises(DegenerateInputError):
        linear_factors(MultiPoly3())


def test_linear_factors_division_and_recombination():
    rng = random.Random(31)
    for _ in range(20):
        # build a square-free product of distinct planes and a plane-free factor
        normals = [(1, 0, 0), (0, 1, 0), (1, 1, 1), (1, -2, 3)]
        rng.shuffle(normals)
        chosen = normals[: rng.randint(1, 3)]
        p = MultiPoly3.constant(1)
        for n in chosen:
            p = p * (plane_poly(Plane3(n, rng.randint(-3, 3))))
        cof = z - x * y if rng.random() < 0.5 else x * x + y * y + z * z + 1
        p = p * cof
        planes, residual = linear_factors(p)
        assert len(planes) == len(chosen)
        recombined = residual
        for pl in planes:
            assert divexact(p, plane_poly(pl)) is not None
            recombined = recombined * plane_poly(pl)
        assert recombined == p
        assert len(planes) <= p.degree


def test_linear_factors_count_bounded_by_degree():
    p = (x - 1) * (x - 2) * (y - 1) * (z - 1)
    planes, residual = linear_factors(p)
    assert len(planes) == 4 <= p.degree
    assert residual.degree == 0


def test_linear_factors_rational_offsets():
    p = (x.scale(2) + y.scale(3) - 1) * (z - x * y)
    planes, residual = linear_factors(p)
    assert planes == [Plane3((2, 3, 0), -1)]
    assert residual == z - x * y


# -- resultants --------------------------------------------------------------


def test_resultant_examples():
    assert resultant_x(x - y, x - z) == y - z
    assert resultant_x(x * x - y, x - z) == z * z - y
    p = z - x * y
    assert resultant_x(p, p).is_zero()
    with pytest.raises(PreconditionError):
        resultant_x(y, x - z)


def test_resultant_detects_common_factors():
    rng = random.Random(19)
    for _ in range(12):
        h = x + y.scale(rng.randint(1, 3)) + MultiPoly3.constant(rng.randint(-2, 2))
        u = x - z + MultiPoly3.constant(rng.randint(-2, 2))
        v = x + z.scale(rng.randint(1, 2)) + MultiPoly3.constant(rng.randint(1, 3))
        assert resultant_x(h * u, h * v).is_zero()
        r = resultant_x(u, v)
        assert not r.is_zero()  # u, v coprime in x by construction


# -- second-order Taylor form -------------------------------------------------


def test_taylor2_examples():
    p = z - x * y
    assert taylor2(p, Point3(0, 0, 0)) == p
    cubic = x**3
    expected = MultiPoly3({(2, 0, 0): 3, (1, 0, 0): -3, (0, 0, 0): 1})
    assert taylor2(cubic, Point3(1, 0, 0)) == expected
    linear = x + y.scale(2) - 7
    assert taylor2(linear, Point3(3, -1, 5)) == linear


def test_taylor2_matches_value_gradient_hessian():
    rng = random.Random(3)
    for _ in range(15):
        p = random_poly(rng, rng.randint(1, 5), terms=6)
        a = Point3(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        q = taylor2(p, a)
        assert q.degree <= 2
        assert q.eval(a) == p.eval(a)
        assert [gi.eval(a) for gi in gradient(q)] == [gi.eval(a) for gi in gradient(p)]
        Hq = [[e.eval(a) for e in row] for row in hessian(q)]
        Hp = [[e.eval(a) for e in row] for row in hessian(p)]
        assert Hq == Hp


# -- rational roots -----------------------------------------------------------


def test_rational_roots_examples():
    assert rational_roots(UniPoly([-1, 0, 1])) == [Fraction(-1), Fraction(1)]
    assert rational_roots(UniPoly([0, 0, 3])) == [Fraction(0)]
    # 6t^2 - 5t + 1 = (2t-1)(3t-1)
    assert rational_roots(UniPoly([1, -5, 6])) == [Fraction(1, 3), Fraction(1, 2)]
    assert rational_roots(UniPoly([1, 0, 1])) == []


def test_rational_roots_random_products():
    rng = random.Random(53)
    for _ in range(30):
        roots = set()
        poly = UniPoly([rng.choice([1, 2, 3])])
        for _ in range(rng.randint(1, 4)):
            r = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            roots.add(r)
            poly = poly * UniPoly([-r.numerator, r.denominator])
        assert rational_roots(poly) == sorted(roots)
