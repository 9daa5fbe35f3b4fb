"""Sparse exact trivariate polynomial algebra over the rationals.

Terms are stored as an exponent-triple -> nonzero Fraction map.  The zero
polynomial is the empty map and its degree is the -inf sentinel.  Wherever a
deterministic order matters (serialization, leading terms, candidate
enumeration) graded lexicographic order with x > y > z is used.

Multivariate gcd runs on primitive polynomial remainder sequences, recursing
on the variables in the fixed order x, y, z; this is adequate for the desk
scale the package targets (total degrees up to ~15).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateInputError, PreconditionError
from .geom import Line3, Plane3, Point3

NEG_INF = float("-inf")

Term = tuple[int, int, int]


def _grlex_key(t: Term):
    return (t[0] + t[1] + t[2], t[0], t[1], t[2])


class MultiPoly3:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Term, object] | None = None):
        clean: dict[Term, Fraction] = {}
        if terms:
            for expo, coef in terms.items():
                c = Fraction(coef)
                if c != 0:
                    i, j, k = expo
                    clean[(int(i), int(j), int(k))] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "MultiPoly3":
        return cls()

    @classmethod
    def constant(cls, c) -> "MultiPoly3":
        return cls({(0, 0, 0): Fraction(c)})

    @classmethod
    def variable(cls, index: int) -> "MultiPoly3":
        expo = [0, 0, 0]
        expo[index] = 1
        return cls({tuple(expo): Fraction(1)})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self):
        if not self.terms:
            return NEG_INF
        return max(i + j + k for (i, j, k) in self.terms)

    def degree_in(self, var: int):
        if not self.terms:
            return NEG_INF
        return max(t[var] for t in self.terms)

    def sorted_terms(self) -> list[tuple[Term, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading(self) -> tuple[Term, Fraction]:
        if not self.terms:
            raise DegenerateInputError("zero polynomial has no leading term")
        t = max(self.terms, key=_grlex_key)
        return t, self.terms[t]

    def leading_form(self) -> "MultiPoly3":
        """Homogeneous part of top total degree."""
        if not self.terms:
            return MultiPoly3()
        d = self.degree
        return MultiPoly3({t: c for t, c in self.terms.items() if sum(t) == d})

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly3):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly3.constant(other)
        return NotImplemented

    def __repr__(self) -> str:
        if not self.terms:
            return "MultiPoly3(0)"
        bits = []
        for (i, j, k), c in self.sorted_terms():
            mono = ""
            for name, e in (("x", i), ("y", j), ("z", k)):
                if e:
                    mono += name + (f"^{e}" if e > 1 else "")
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "MultiPoly3(" + " + ".join(bits) + ")"

    # -- ring operations ----------------------------------------------

    def __add__(self, other) -> "MultiPoly3":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for t, c in other.terms.items():
            s = out.get(t, Fraction(0)) + c
            if s == 0:
                out.pop(t, None)
            else:
                out[t] = s
        res = MultiPoly3.__new__(MultiPoly3)
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly3":
        res = MultiPoly3.__new__(MultiPoly3)
        res.terms = {t: -c for t, c in self.terms.items()}
        return res

    def __sub__(self, other) -> "MultiPoly3":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly3":
        return _coerce(other) - self

    def __mul__(self, other) -> "MultiPoly3":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly3):
            return NotImplemented
        out: dict[Term, Fraction] = {}
        for (i1, j1, k1), c1 in self.terms.items():
            for (i2, j2, k2), c2 in other.terms.items():
                t = (i1 + i2, j1 + j2, k1 + k2)
                s = out.get(t, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(t, None)
                else:
                    out[t] = s
        res = MultiPoly3.__new__(MultiPoly3)
        res.terms = out
        return res

    __rmul__ = __mul__

    def scale(self, k) -> "MultiPoly3":
        k = Fraction(k)
        if k == 0:
            return MultiPoly3()
        res = MultiPoly3.__new__(MultiPoly3)
        res.terms = {t: c * k for t, c in self.terms.items()}
        return res

    def __pow__(self, n: int) -> "MultiPoly3":
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly3.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- evaluation and calculus ---------------------------------------

    def eval(self, point) -> Fraction:
        if isinstance(point, Point3):
            px, py, pz = point.x, point.y, point.z
        else:
            px, py, pz = (Fraction(v) for v in point)
        powcache: tuple[dict, dict, dict] = ({}, {}, {})
        bases = (px, py, pz)

        def pw(var, e):
            v = powcache[var].get(e)
            if v is None:
                v = bases[var] ** e
                powcache[var][e] = v
            return v

        total = Fraction(0)
        for (i, j, k), c in self.terms.items():
            total += c * pw(0, i) * pw(1, j) * pw(2, k)
        return total

    def derivative(self, var: int) -> "MultiPoly3":
        out: dict[Term, Fraction] = {}
        for t, c in self.terms.items():
            e = t[var]
            if e == 0:
                continue
            nt = list(t)
            nt[var] = e - 1
            out[tuple(nt)] = c * e
        res = MultiPoly3.__new__(MultiPoly3)
        res.terms = out
        return res

    def compose_linear(self, matrix: Sequence[Sequence], shift: Sequence | None = None) -> "MultiPoly3":
        """Substitute u -> M u + s, i.e. return p(M u + s)."""
        rows = [[Fraction(v) for v in row] for row in matrix]
        s = [Fraction(v) for v in (shift or (0, 0, 0))]
        imgs = []
        for r in range(3):
            img = MultiPoly3.constant(s[r])
            for c in range(3):
                if rows[r][c] != 0:
                    img = img + MultiPoly3.variable(c).scale(rows[r][c])
            imgs.append(img)
        caches: list[dict[int, MultiPoly3]] = [{0: MultiPoly3.constant(1)} for _ in range(3)]

        def pw(var, e):
            cache = caches[var]
            while max(cache) < e:
                m = max(cache)
                cache[m + 1] = cache[m] * imgs[var]
            return cache[e]

        total = MultiPoly3()
        for (i, j, k), c in self.terms.items():
            total = total + (pw(0, i) * pw(1, j) * pw(2, k)).scale(c)
        return total

    # -- views ----------------------------------------------------------

    def as_univariate(self, var: int) -> dict[int, "MultiPoly3"]:
        """View as a univariate polynomial in `var` with MultiPoly3 coefficients."""
        out: dict[int, dict[Term, Fraction]] = {}
        for t, c in self.terms.items():
            e = t[var]
            nt = list(t)
            nt[var] = 0
            out.setdefault(e, {})[tuple(nt)] = c
        return {e: MultiPoly3(d) for e, d in out.items()}

    @staticmethod
    def from_univariate(var: int, coeffs: Mapping[int, "MultiPoly3"]) -> "MultiPoly3":
        out: dict[Term, Fraction] = {}
        for e, poly in coeffs.items():
            for t, c in poly.terms.items():
                nt = list(t)
                nt[var] = nt[var] + e
                out[tuple(nt)] = out.get(tuple(nt), Fraction(0)) + c
        return MultiPoly3(out)

    def to_integer_primitive(self) -> tuple["MultiPoly3", Fraction]:
        """Write p = scale * prim with integer coprime coefficients, positive grlex lead."""
        if not self.terms:
            return MultiPoly3(), Fraction(1)
        denom = lcm(*(c.denominator for c in self.terms.values()))
        nums = {t: int(c * denom) for t, c in self.terms.items()}
        g = 0
        for v in nums.values():
            g = gcd(g, abs(v))
        lead = max(nums, key=_grlex_key)
        sign = 1 if nums[lead] > 0 else -1
        prim = MultiPoly3({t: Fraction(v // (g * sign)) for t, v in nums.items()})
        return prim, Fraction(g * sign, denom)


def _coerce(value):
    if isinstance(value, MultiPoly3):
        return value
    if isinstance(value, (int, Fraction)):
        return MultiPoly3.constant(value)
    return NotImplemented


def variables() -> tuple[MultiPoly3, MultiPoly3, MultiPoly3]:
    return MultiPoly3.variable(0), MultiPoly3.variable(1), MultiPoly3.variable(2)


def gradient(p: MultiPoly3) -> tuple[MultiPoly3, MultiPoly3, MultiPoly3]:
    return (p.derivative(0), p.derivative(1), p.derivative(2))


def hessian(p: MultiPoly3) -> list[list[MultiPoly3]]:
    grads = gradient(p)
    return [[grads[r].derivative(c) for c in range(3)] for r in range(3)]


# ---------------------------------------------------------------------------
# Univariate polynomials (restrictions of p to lines live here)
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial over Fraction, ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self) -> str:
        return f"UniPoly({self.coeffs!r})"

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, UniPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    def scale(self, k) -> "UniPoly":
        k = Fraction(k)
        return UniPoly([c * k for c in self.coeffs])

    def eval(self, t) -> Fraction:
        t = Fraction(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


def restrict_to_line(p: MultiPoly3, line: Line3) -> UniPoly:
    """Compose p with the affine parametrization anchor + t*direction."""
    a = line.anchor
    d = line.direction
    lins = [UniPoly([a.x, d[0]]), UniPoly([a.y, d[1]]), UniPoly([a.z, d[2]])]
    caches: list[dict[int, UniPoly]] = [{0: UniPoly([1])} for _ in range(3)]

    def pw(var, e):
        cache = caches[var]
        while max(cache) < e:
            m = max(cache)
            cache[m + 1] = cache[m] * lins[var]
        return cache[e]

    total = UniPoly()
    for (i, j, k), c in p.terms.items():
        total = total + (pw(0, i) * pw(1, j) * pw(2, k)).scale(c)
    return total


def vanishes_on_line(p: MultiPoly3, line: Line3) -> bool:
    return restrict_to_line(p, line).is_zero()


# ---------------------------------------------------------------------------
# Exact division, gcd, square-free part
# ---------------------------------------------------------------------------


def divexact(p: MultiPoly3, d: MultiPoly3) -> MultiPoly3 | None:
    """Quotient p/d when the division is exact, else None."""
    if d.is_zero():
        raise DegenerateInputError("division by the zero polynomial")
    if p.is_zero():
        return MultiPoly3()
    lt_d, lc_d = d.leading()
    rem = dict(p.terms)
    quo: dict[Term, Fraction] = {}
    while rem:
        lt_r = max(rem, key=_grlex_key)
        lc_r = rem[lt_r]
        e = (lt_r[0] - lt_d[0], lt_r[1] - lt_d[1], lt_r[2] - lt_d[2])
        if e[0] < 0 or e[1] < 0 or e[2] < 0:
            return None
        coef = lc_r / lc_d
        quo[e] = quo.get(e, Fraction(0)) + coef
        for (i, j, k), c in d.terms.items():
            t = (i + e[0], j + e[1], k + e[2])
            s = rem.get(t, Fraction(0)) - coef * c
            if s == 0:
                rem.pop(t, None)
            else:
                rem[t] = s
    return MultiPoly3(quo)


def _view_degree(view: dict[int, MultiPoly3]) -> int:
    return max(view) if view else -1


def _view_prem(A: dict[int, MultiPoly3], B: dict[int, MultiPoly3]) -> dict[int, MultiPoly3]:
    """Pseudo-remainder of univariate views with polynomial coefficients."""
    dB = _view_degree(B)
    lb = B[dB]
    R = dict(A)
    while R and _view_degree(R) >= dB:
        dR = _view_degree(R)
        lr = R[dR]
        s = dR - dB
        newR: dict[int, MultiPoly3] = {}
        for k, c in R.items():
            newR[k] = c * lb
        for k, c in B.items():
            prod = lr * c
            newR[k + s] = newR.get(k + s, MultiPoly3()) - prod
        R = {k: v for k, v in newR.items() if not v.is_zero()}
    return R


def _view_content(view: dict[int, MultiPoly3]) -> MultiPoly3:
    g = MultiPoly3()
    for c in view.values():
        g = mpoly_gcd(g, c)
        if g.degree == 0:
            break
    return g if not g.is_zero() else MultiPoly3.constant(1)


def _view_primitive(view: dict[int, MultiPoly3]) -> dict[int, MultiPoly3]:
    cont = _view_content(view)
    if cont.degree == 0 and cont.leading()[1] == 1:
        return view
    out = {}
    for k, c in view.items():
        q = divexact(c, cont)
        assert q is not None
        out[k] = q
    return out


def _gcd_rec(p: MultiPoly3, q: MultiPoly3) -> MultiPoly3:
    # Both nonzero with integer primitive coefficients.
    main = None
    for v in range(3):
        if (p.degree_in(v) if not p.is_zero() else 0) > 0 or (q.degree_in(v) if not q.is_zero() else 0) > 0:
            main = v
            break
    if main is None:
        return MultiPoly3.constant(1)
    A = p.as_univariate(main)
    B = q.as_univariate(main)
    contA = _view_content(A)
    contB = _view_content(B)
    cont_gcd = mpoly_gcd(contA, contB)
    A = _view_primitive(A)
    B = _view_primitive(B)
    if _view_degree(A) < _view_degree(B):
        A, B = B, A
    while True:
        R = _view_prem(A, B)
        if not R:
            g_main = MultiPoly3.from_univariate(main, _view_primitive(B))
            break
        if _view_degree(R) == 0:
            g_main = MultiPoly3.constant(1)
            break
        A, B = B, _view_primitive(R)
    result = cont_gcd * g_main
    return result.to_integer_primitive()[0]


def mpoly_gcd(p: MultiPoly3, q: MultiPoly3) -> MultiPoly3:
    """Gcd up to scale, returned as primitive integers with positive grlex lead."""
    if p.is_zero() and q.is_zero():
        return MultiPoly3()
    if p.is_zero():
        return q.to_integer_primitive()[0]
    if q.is_zero():
        return p.to_integer_primitive()[0]
    return _gcd_rec(p.to_integer_primitive()[0], q.to_integer_primitive()[0])


def squarefree_part(p: MultiPoly3) -> MultiPoly3:
    """p divided by the gcd of p and its three partials (char 0)."""
    if p.is_zero():
        raise DegenerateInputError("square-free part of the zero polynomial")
    if p.degree == 0:
        return p
    g = p
    for v in range(3):
        g = mpoly_gcd(g, p.derivative(v))
        if g.degree == 0:
            return p
    q = divexact(p, g)
    assert q is not None, "gcd must divide p exactly"
    return q


# ---------------------------------------------------------------------------
# Second-order Taylor form
# ---------------------------------------------------------------------------


def taylor2(p: MultiPoly3, a: Point3) -> MultiPoly3:
    """q(u) = p(a) + grad p(a).(u-a) + 1/2 (u-a)^T H_p(a) (u-a), exactly."""
    val = p.eval(a)
    grads = [gi.eval(a) for gi in gradient(p)]
    hess = [[hij.eval(a) for hij in row] for row in hessian(p)]
    coords = (a.x, a.y, a.z)
    diffs = [MultiPoly3.variable(i) - MultiPoly3.constant(coords[i]) for i in range(3)]
    q = MultiPoly3.constant(val)
    for i in range(3):
        if grads[i] != 0:
            q = q + diffs[i].scale(grads[i])
    for i in range(3):
        for j in range(3):
            if hess[i][j] != 0:
                q = q + (diffs[i] * diffs[j]).scale(Fraction(hess[i][j], 2))
    return q


# ---------------------------------------------------------------------------
# Resultants (Sylvester matrix, fraction-free determinant)
# ---------------------------------------------------------------------------


def _poly_mat_det(mat: list[list[MultiPoly3]]) -> MultiPoly3:
    """Bareiss determinant over the polynomial ring; divisions are exact."""
    n = len(mat)
    m = [row[:] for row in mat]
    sign = 1
    prev = MultiPoly3.constant(1)
    for k in range(n - 1):
        piv = None
        for r in range(k, n):
            if not m[r][k].is_zero():
                piv = r
                break
        if piv is None:
            return MultiPoly3()
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                q = divexact(num, prev)
                assert q is not None, "Bareiss division must be exact"
                m[i][j] = q
            m[i][k] = MultiPoly3()
        prev = m[k][k]
    return m[n - 1][n - 1].scale(sign)


def _resultant(p: MultiPoly3, q: MultiPoly3, var: int) -> MultiPoly3:
    dp = p.degree_in(var) if not p.is_zero() else NEG_INF
    dq = q.degree_in(var) if not q.is_zero() else NEG_INF
    if dp is NEG_INF or dq is NEG_INF or dp < 1 or dq < 1:
        raise PreconditionError("resultant needs positive degree in the eliminated variable")
    A = p.as_univariate(var)
    B = q.as_univariate(var)
    n = dp + dq
    zero = MultiPoly3()
    p_desc = [A.get(e, zero) for e in range(dp, -1, -1)]
    q_desc = [B.get(e, zero) for e in range(dq, -1, -1)]
    rows: list[list[MultiPoly3]] = []
    for i in range(dq):
        rows.append([zero] * i + p_desc + [zero] * (n - dp - 1 - i))
    for i in range(dp):
        rows.append([zero] * i + q_desc + [zero] * (n - dq - 1 - i))
    return _poly_mat_det(rows)


def resultant_x(p: MultiPoly3, q: MultiPoly3) -> MultiPoly3:
    return _resultant(p, q, 0)


def resultant_y(p: MultiPoly3, q: MultiPoly3) -> MultiPoly3:
    return _resultant(p, q, 1)


def resultant_z(p: MultiPoly3, q: MultiPoly3) -> MultiPoly3:
    return _resultant(p, q, 2)


# ---------------------------------------------------------------------------
# Integer factorization helpers for rational root search
# ---------------------------------------------------------------------------


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        x = y = 2
        d = 1
        f = lambda v: (v * v + c) % n
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"failed to split {n}")


def _factorize(n: int) -> dict[int, int]:
    assert n >= 1
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    wi = 0
    while f * f <= n and f < 100_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += wheel[wi]
        wi = (wi + 1) % 8
    if n > 1:
        stack = [n]
        while stack:
            v = stack.pop()
            if v == 1:
                continue
            if _is_probable_prime(v):
                out[v] = out.get(v, 0) + 1
            else:
                d = _pollard_rho(v)
                stack.append(d)
                stack.append(v // d)
    return out


def _divisors(n: int) -> list[int]:
    if n == 0:
        raise DegenerateInputError("divisors of zero requested")
    facs = _factorize(abs(n))
    divs = [1]
    for p, e in facs.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def rational_roots(u: UniPoly) -> list[Fraction]:
    """All rational roots of a nonzero univariate polynomial, sorted."""
    if u.is_zero():
        raise DegenerateInputError("rational roots of the zero polynomial")
    denom = lcm(*(c.denominator for c in u.coeffs))
    ints = [int(c * denom) for c in u.coeffs]
    roots: set[Fraction] = set()
    shift = 0
    while ints and ints[0] == 0:
        ints.pop(0)
        shift += 1
    if shift:
        roots.add(Fraction(0))
    if len(ints) <= 1:
        return sorted(roots)
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    a0, an = ints[0], ints[-1]
    f1 = sum(ints)
    fm1 = sum(c if (i % 2 == 0) else -c for i, c in enumerate(ints))
    for pnum in _divisors(a0):
        for qden in _divisors(an):
            if gcd(pnum, qden) != 1:
                continue
            for num in (pnum, -pnum):
                # classical filters: (num - qden) | f(1), (num + qden) | f(-1)
                if f1 != 0 and num != qden and f1 % (num - qden) != 0:
                    continue
                if fm1 != 0 and num != -qden and fm1 % (num + qden) != 0:
                    continue
                # exact integer evaluation of qden^deg * f(num/qden)
                acc = 0
                for i, c in enumerate(reversed(ints)):
                    acc = acc * num + c * qden**i
                if acc == 0:
                    roots.add(Fraction(num, qden))
    return sorted(roots)


# ---------------------------------------------------------------------------
# Linear factor extraction (candidate-plane strategy)
# ---------------------------------------------------------------------------


def plane_poly(plane: Plane3) -> MultiPoly3:
    n = plane.normal
    return MultiPoly3(
        {(1, 0, 0): n[0], (0, 1, 0): n[1], (0, 0, 1): n[2], (0, 0, 0): plane.offset}
    )


def _bivariate_specialize_y(g: MultiPoly3, y0: int) -> UniPoly:
    """g(x, y0) for a polynomial with no z terms; result univariate in x."""
    out: dict[int, Fraction] = {}
    for (i, j, _k), c in g.terms.items():
        out[i] = out.get(i, Fraction(0)) + c * Fraction(y0) ** j
    coeffs = [out.get(i, Fraction(0)) for i in range(max(out, default=0) + 1)]
    return UniPoly(coeffs)


def _y_coeff_unipoly(poly: MultiPoly3) -> UniPoly:
    """A z-free, x-free MultiPoly3 as a univariate polynomial in y."""
    out: dict[int, Fraction] = {}
    for (_i, j, _k), c in poly.terms.items():
        out[j] = out.get(j, Fraction(0)) + c
    return UniPoly([out.get(j, Fraction(0)) for j in range(max(out, default=0) + 1)])


def _leading_form_directions(p: MultiPoly3) -> list[tuple[int, int, int]]:
    """Primitive normals of candidate linear factors of p's leading form.

    A linear factor of p forces a linear factor of the top homogeneous form,
    so this candidate set is complete; every candidate is verified by exact
    division before it is believed.
    """
    from .exactcore import primitive_integer

    F = p.leading_form()
    if F.is_zero() or F.degree < 1:
        return []
    dirs: set[tuple[int, int, int]] = set()
    # factor z: every term carries z
    e = min(k for (_i, _j, k) in F.terms)
    if e >= 1:
        dirs.add((0, 0, 1))
        F = MultiPoly3({(i, j, k - e): c for (i, j, k), c in F.terms.items()})
    # dehomogenize at z = 1: bivariate in (x, y); factors homogenize back
    acc: dict[Term, Fraction] = {}
    for (i, j, _k), c in F.terms.items():
        t = (i, j, 0)
        acc[t] = acc.get(t, Fraction(0)) + c
    g = MultiPoly3(acc)
    if g.is_zero() or g.degree == 0:
        return sorted(dirs)
    # factors x + beta*y + gamma: interpolate from two y-specializations
    if g.degree_in(0) >= 1:
        specs: list[tuple[int, UniPoly]] = []
        for y_cand in range(-(g.degree + 2), g.degree + 3):
            u = _bivariate_specialize_y(g, y_cand)
            if not u.is_zero():
                specs.append((y_cand, u))
                if len(specs) == 2:
                    break
        if len(specs) == 2:
            (y0, u0), (y1, u1) = specs
            roots0 = rational_roots(u0) if u0.degree >= 1 else []
            roots1 = rational_roots(u1) if u1.degree >= 1 else []
            for r0 in roots0:
                for r1 in roots1:
                    beta = (r1 - r0) / Fraction(y0 - y1)
                    gamma = -r0 - beta * y0
                    dirs.add(primitive_integer((Fraction(1), beta, gamma)))
    # factors y + gamma (no x): constants c with g(x, c) identically zero
    view = g.as_univariate(0)
    probe = _y_coeff_unipoly(view[min(view)])
    if not probe.is_zero() and probe.degree >= 1:
        for c in rational_roots(probe):
            if all(_y_coeff_unipoly(coeff).eval(c) == 0 for coeff in view.values()):
                dirs.add(primitive_integer((Fraction(0), Fraction(1), -c)))
    return sorted(dirs)


def _anchor_sequence():
    yield (0, 0, 0)
    radius = 1
    while True:
        pts = []
        for x in range(-radius, radius + 1):
            for y in range(-radius, radius + 1):
                for z in range(-radius, radius + 1):
                    if max(abs(x), abs(y), abs(z)) == radius:
                        pts.append((x, y, z))
        for p in sorted(pts):
            yield p
        radius += 1


def _offsets_for_direction(p: MultiPoly3, n: tuple[int, int, int]) -> list[Fraction]:
    """Candidate constants delta with (n.u + delta) possibly dividing p.

    Restrict p to a lattice line with direction n; a vanishing plane normal
    to n crosses that line in a root of the restriction, so the rational
    roots enumerate every possible offset.
    """
    nn = n[0] * n[0] + n[1] * n[1] + n[2] * n[2]
    for ax, ay, az in _anchor_sequence():
        lins = [UniPoly([ax, n[0]]), UniPoly([ay, n[1]]), UniPoly([az, n[2]])]
        caches: list[dict[int, UniPoly]] = [{0: UniPoly([1])} for _ in range(3)]

        def pw(var, e):
            cache = caches[var]
            while max(cache) < e:
                m = max(cache)
                cache[m + 1] = cache[m] * lins[var]
            return cache[e]

        r = UniPoly()
        for (i, j, k), c in p.terms.items():
            r = r + (pw(0, i) * pw(1, j) * pw(2, k)).scale(c)
        if not r.is_zero():
            dot0 = n[0] * ax + n[1] * ay + n[2] * az
            if r.degree < 1:
                return []
            return sorted(-(Fraction(dot0) + t0 * nn) for t0 in rational_roots(r))
    raise AssertionError("nonzero polynomial restricts nonzero on some lattice line")


def linear_factors(
    p: MultiPoly3, extra_planes: Iterable[Plane3] = ()
) -> tuple[list[Plane3], MultiPoly3]:
    """Split off all linear factors of a square-free p as canonical planes.

    Candidates come from the linear factors of the leading form (complete for
    genuine factors) plus any caller-supplied planes; each is kept only if it
    divides exactly.  Returns the planes and the residual cofactor.
    """
    if p.is_zero():
        raise DegenerateInputError("linear factors of the zero polynomial")
    candidates: set[Plane3] = set(extra_planes)
    for n in _leading_form_directions(p):
        for delta in _offsets_for_direction(p, n):
            candidates.add(Plane3(n, delta))
    planes: list[Plane3] = []
    residual = p
    for plane in sorted(candidates, key=Plane3.sort_key):
        q = divexact(residual, plane_poly(plane))
        if q is not None:
            planes.append(plane)
            residual = q
    return planes, residual
