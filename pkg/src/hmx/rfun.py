"""Bivariate rational functions with cyclotomic coefficients, and the lattice
cone sums that produce them in closed form.

A ``RationalFn2`` is N(u, v) / prod (1 - u^a v^b)^m.  The numerator is a
sparse map (i, j, k) -> rational meaning coefficient * zeta_n^k * u^i v^j, with
n the function's cyclotomic order.  Every denominator exponent (a, b) is
oriented with a > 0, or a = 0 and b > 0.

Cone sums use the half-open fundamental parallelogram of the two extreme
rays, each ray scaled to the first lattice vector on which the twisting
character is trivial.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath

from . import intmat
from .cyclo import CycloCoeff, reduce_group_ring
from .errors import DomainError, InputError, PoleError
from .intmat import Mat2
from .lattice import ZModule
from .qfield import QuadNum
from .torus import ActionMatrix, Numeric, ThetaFrame, Torsion, kernel

Key = Tuple[int, int, int]
Exp = Tuple[int, int]

INF = math.inf


def _orient(r: Exp) -> Tuple[Exp, bool]:
    """Return (r', flipped) with r' = +-r positively oriented."""
    a, b = r
    if a == 0 and b == 0:
        raise DomainError("denominator factor 1 - u^0 v^0 is identically zero")
    if a > 0 or (a == 0 and b > 0):
        return r, False
    return (-a, -b), True


class RationalFn2:
    """Immutable bivariate rational function over Q(zeta_n)."""

    __slots__ = ("order", "num", "den", "tags")

    def __init__(self, num: Dict[Key, Fraction], den: Dict[Exp, int] | None = None,
                 order: int = 1, tags: Sequence[str] = ()):
        order = int(order)
        num2: Dict[Key, Fraction] = defaultdict(Fraction)
        for (i, j, k), c in num.items():
            if c:
                num2[(i, j, k % order)] += Fraction(c)
        den2: Counter = Counter()
        sign_shift: List[Exp] = []
        for r, m in (den or {}).items():
            if m <= 0:
                raise DomainError("denominator multiplicities must be positive")
            r2, flipped = _orient(tuple(r))
            den2[r2] += m
            if flipped:
                # 1/(1 - x^r) = -x^-r / (1 - x^-r)
                sign_shift.extend([r2] * m)
        if sign_shift:
            sa = sum(r[0] for r in sign_shift)
            sb = sum(r[1] for r in sign_shift)
            sgn = -1 if len(sign_shift) % 2 else 1
            num2 = {(i + sa, j + sb, k): c * sgn for (i, j, k), c in num2.items()}
        self.order = order
        self.num = {key: c for key, c in num2.items() if c}
        self.den = dict(den2)
        self.tags = tuple(tags)

    # constructors
    @classmethod
    def zero(cls) -> "RationalFn2":
        return cls({})

    @classmethod
    def monomial(cls, i: int, j: int, coeff=1) -> "RationalFn2":
        return cls({(i, j, 0): Fraction(coeff)})

    def _lifted(self, n: int) -> Dict[Key, Fraction]:
        if n % self.order:
            raise ValueError("bad lift")
        s = n // self.order
        return {(i, j, k * s): c for (i, j, k), c in self.num.items()}

    # arithmetic
    def _with_den(self, den: Counter, n: int) -> Dict[Key, Fraction]:
        """Numerator over the larger denominator ``den`` (a super-multiset)."""
        num = self._lifted(n)
        extra = Counter(den)
        extra.subtract(self.den)
        for r, m in extra.items():
            if m < 0:
                raise ValueError("not a super-multiset")
            for _ in range(m):
                num = _poly_mul(num, {(0, 0, 0): Fraction(1), (r[0], r[1], 0): Fraction(-1)}, n)
        return num

    def __add__(self, other: "RationalFn2") -> "RationalFn2":
        if not isinstance(other, RationalFn2):
            return NotImplemented
        n = math.lcm(self.order, other.order)
        den = Counter(self.den) | Counter(other.den)
        a = self._with_den(den, n)
        b = other._with_den(den, n)
        out = defaultdict(Fraction, a)
        for key, c in b.items():
            out[key] += c
        return RationalFn2(out, den, n)

    def __neg__(self) -> "RationalFn2":
        return RationalFn2({k: -c for k, c in self.num.items()}, self.den, self.order)

    def __sub__(self, other: "RationalFn2") -> "RationalFn2":
        return self + (-other)

    def __mul__(self, other) -> "RationalFn2":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, CycloCoeff):
            n = math.lcm(self.order, other.order)
            c = {(0, 0, k * (n // other.order)): x for k, x in other.group_ring().items()}
            return RationalFn2(_poly_mul(self._lifted(n), c, n), self.den, n)
        if isinstance(other, RationalFn2):
            n = math.lcm(self.order, other.order)
            den = Counter(self.den) + Counter(other.den)
            return RationalFn2(_poly_mul(self._lifted(n), other._lifted(n), n), den, n)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c) -> "RationalFn2":
        c = Fraction(c)
        return RationalFn2({k: x * c for k, x in self.num.items()}, self.den, self.order)

    def is_zero(self) -> bool:
        return not self.reduced_numerator()

    def reduced_numerator(self) -> Dict[Tuple[int, int], Tuple[Fraction, ...]]:
        """Numerator with coefficients in canonical power-basis coordinates."""
        return _reduce_poly(self.num, self.order)

    def numerator_coeffs(self) -> Dict[Tuple[int, int], CycloCoeff]:
        return {ij: CycloCoeff(self.order, v) for ij, v in self.reduced_numerator().items()}

    def denominator(self) -> List[Tuple[int, int, int]]:
        return sorted((a, b, m) for (a, b), m in self.den.items())

    def __repr__(self):
        return f"RationalFn2(order={self.order}, terms={len(self.num)}, den={self.denominator()})"

    # JSON
    def to_json(self) -> dict:
        num = []
        for (i, j), v in sorted(self.reduced_numerator().items()):
            num.append([i, j, CycloCoeff(self.order, v).to_json()])
        return {"num": num, "den": [list(t) for t in self.denominator()]}

    @classmethod
    def from_json(cls, obj) -> "RationalFn2":
        try:
            terms = []
            n = 1
            for i, j, c in obj["num"]:
                cc = CycloCoeff.from_json(c)
                n = math.lcm(n, cc.order)
                terms.append((int(i), int(j), cc))
            num: Dict[Key, Fraction] = defaultdict(Fraction)
            for i, j, cc in terms:
                for k, x in cc.lift(n).group_ring().items():
                    num[(i, j, k)] += x
            den = {}
            for a, b, m in obj["den"]:
                den[(int(a), int(b))] = den.get((int(a), int(b)), 0) + int(m)
            return cls(num, den, n)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad rational function JSON: {exc}") from exc


def _poly_mul(p: Dict[Key, Fraction], q: Dict[Key, Fraction], n: int) -> Dict[Key, Fraction]:
    out: Dict[Key, Fraction] = defaultdict(Fraction)
    for (i1, j1, k1), c1 in p.items():
        for (i2, j2, k2), c2 in q.items():
            out[(i1 + i2, j1 + j2, (k1 + k2) % n)] += c1 * c2
    return out


def _reduce_poly(num: Dict[Key, Fraction], n: int) -> Dict[Tuple[int, int], Tuple[Fraction, ...]]:
    groups: Dict[Tuple[int, int], Dict[int, Fraction]] = defaultdict(dict)
    for (i, j, k), c in num.items():
        g = groups[(i, j)]
        g[k] = g.get(k, 0) + c
    out = {}
    for ij, vec in groups.items():
        red = reduce_group_ring(vec, n)
        if any(red):
            out[ij] = red
    return out


def _den_poly(den: Counter) -> Dict[Key, Fraction]:
    out = {(0, 0, 0): Fraction(1)}
    for r, m in den.items():
        for _ in range(m):
            out = _poly_mul(out, {(0, 0, 0): Fraction(1), (r[0], r[1], 0): Fraction(-1)}, 1)
    return out


# ----------------------------------------------------------------------------
# structural operations


def rf_add(a: RationalFn2, b: RationalFn2) -> RationalFn2:
    return a + b


def rf_sub(a: RationalFn2, b: RationalFn2) -> RationalFn2:
    return a - b


def rf_scale(a: RationalFn2, c) -> RationalFn2:
    return a * c


def rf_equal(r1: RationalFn2, r2: RationalFn2) -> bool:
    """Exact identity test by cross multiplication."""
    n = math.lcm(r1.order, r2.order)
    d1, d2 = Counter(r1.den), Counter(r2.den)
    common = d1 & d2
    lhs = _poly_mul(r1._lifted(n), _den_poly(d2 - common), n)
    rhs = _poly_mul(r2._lifted(n), _den_poly(d1 - common), n)
    diff = defaultdict(Fraction, lhs)
    for key, c in rhs.items():
        diff[key] -= c
    return not _reduce_poly(diff, n)


def twist_by_rotation(R: RationalFn2, rot: Tuple[Fraction, Fraction]) -> RationalFn2:
    """Substitute (u, v) -> (e(r0) u, e(r1) v)."""
    r0, r1 = Fraction(rot[0]), Fraction(rot[1])
    n = math.lcm(R.order, r0.denominator, r1.denominator)
    s = n // R.order
    num: Dict[Key, Fraction] = defaultdict(Fraction)
    for (i, j, k), c in R.num.items():
        num[(i, j, (k * s + int((i * r0 + j * r1) * n)) % n)] += c
    den: Counter = Counter()
    for (a, b), m in R.den.items():
        phase = a * r0 + b * r1
        o = phase.denominator
        den[(a * o, b * o)] += m
        if o > 1:
            # 1/(1 - c x^r) = (sum_{t<o} c^t x^{t r}) / (1 - x^{o r})
            geo = {(t * a, t * b, int(t * phase * n) % n): Fraction(1) for t in range(o)}
            for _ in range(m):
                num = _poly_mul(num, geo, n)
    return RationalFn2(num, den, n, R.tags)


def twist(R: RationalFn2, zeta: Torsion) -> RationalFn2:
    return twist_by_rotation(R, zeta.rotation())


def compose_pow(R: RationalFn2, A: Union[ActionMatrix, Mat2]) -> RationalFn2:
    """R(u^a v^b, u^c v^d) for A = [[a, b], [c, d]]."""
    m = A.m if isinstance(A, ActionMatrix) else A
    if intmat.det(m) == 0:
        raise DomainError("compose_pow needs a non-singular matrix")
    num = {}
    for (i, j, k), c in R.num.items():
        i2, j2 = intmat.apply_row((i, j), m)
        num[(i2, j2, k)] = num.get((i2, j2, k), 0) + c
    den: Dict[Exp, int] = {}
    for r, mult in R.den.items():
        r2 = intmat.apply_row(r, m)
        den[r2] = den.get(r2, 0) + mult
    return RationalFn2(num, den, R.order, R.tags)


def rf_eval(R: RationalFn2, p: Numeric, prec: Optional[int] = None) -> mpmath.mpc:
    """Value at a numeric point with arbitrary-precision complex arithmetic."""
    prec = prec or p.prec
    with mpmath.workprec(prec + 24):
        u, v = mpmath.mpc(p.u), mpmath.mpc(p.v)
        upow: Dict[int, mpmath.mpc] = {}
        vpow: Dict[int, mpmath.mpc] = {}

        def pw(cache, base, e):
            if e not in cache:
                if base == 0 and e < 0:
                    raise PoleError("negative power of zero")
                cache[e] = base ** e
            return cache[e]

        n = R.order
        roots = [mpmath.expjpi(mpmath.mpf(2 * k) / n) for k in range(n)] if n > 1 else [mpmath.mpc(1)]
        den = mpmath.mpc(1)
        tiny = mpmath.ldexp(1, -(prec // 2 + 8))
        for (a, b), m in R.den.items():
            f = 1 - pw(upow, u, a) * pw(vpow, v, b)
            if abs(f) <= tiny:
                raise PoleError(f"point is at a zero of 1 - u^{a} v^{b}")
            den *= f ** m
        total = mpmath.mpc(0)
        for (i, j, k), c in R.num.items():
            total += (mpmath.mpf(c.numerator) / c.denominator) * roots[k] * pw(upow, u, i) * pw(vpow, v, j)
        return total / den


def f_inf() -> RationalFn2:
    """uv / ((1 - u)(1 - v))."""
    return RationalFn2({(1, 1, 0): Fraction(1)}, {(1, 0): 1, (0, 1): 1})


def expand(R: RationalFn2, max_l: int, max_h: Optional[int] = None) -> Dict[Key, Fraction]:
    """Power-series coefficients of R for exponents with l <= max_l (and h <= max_h).

    Every denominator exponent must have a >= 1, or when ``max_h`` is given,
    all exponents must be non-negative.
    """
    factors = []
    for (a, b), m in R.den.items():
        if a == 0 and max_h is None:
            raise DomainError("a pure v-factor needs an h bound")
        if max_h is not None and b < 0:
            raise DomainError("h truncation needs non-negative exponents")
        factors.extend([(a, b)] * m)

    def keep(i, j):
        return i <= max_l and (max_h is None or j <= max_h)

    out: Dict[Key, Fraction] = {k: c for k, c in R.num.items() if keep(k[0], k[1])}
    for a, b in factors:
        geo = {}
        t = 0
        while t * a <= max_l and (max_h is None or t * b <= max_h):
            geo[(t * a, t * b, 0)] = Fraction(1)
            t += 1
        out = {k: c for k, c in _poly_mul(out, geo, R.order).items() if keep(k[0], k[1]) and c}
    return out


# ----------------------------------------------------------------------------
# cone sums


def _primitive(v: Tuple[Fraction, Fraction]) -> Tuple[int, int]:
    den = math.lcm(Fraction(v[0]).denominator, Fraction(v[1]).denominator)
    x, y = int(v[0] * den), int(v[1] * den)
    g = math.gcd(x, y)
    return (x // g, y // g)


def _form_int(f: Tuple[Fraction, Fraction]) -> Tuple[int, int]:
    """Positive multiple of a rational linear form with coprime integer entries."""
    return _primitive(f)


def lattice_cone_sum(lattice: Mat2, f1: Tuple, strict1: bool, f2: Tuple, strict2: bool,
                     rot: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))) -> RationalFn2:
    """Sum of e(rot . x) u^x1 v^x2 over non-zero x in the lattice with
    f1(x) > 0 (or >= 0) and f2(x) > 0 (or >= 0).

    ``lattice`` is an HNF basis ((a, b), (0, c)) of a full-rank subgroup of Z^2.
    The two forms must be linearly independent.
    """
    f1 = _form_int(f1)
    f2 = _form_int(f2)
    if f1[0] * f2[1] - f1[1] * f2[0] == 0:
        raise DomainError("cone boundary forms are parallel")
    r0, r1 = Fraction(rot[0]), Fraction(rot[1])
    n = math.lcm(r0.denominator, r1.denominator)

    def val(f, x):
        return f[0] * x[0] + f[1] * x[1]

    def ray(f_on, f_pos):
        r = (f_on[1], -f_on[0])
        if val(f_pos, r) < 0:
            r = (-r[0], -r[1])
        k = 1
        while not intmat.in_hnf(lattice, (k * r[0], k * r[1])):
            k += 1
        r = (k * r[0], k * r[1])
        o = (r[0] * r0 + r[1] * r1).denominator
        return (o * r[0], o * r[1])

    R1 = ray(f1, f2)  # on the face f1 = 0
    R2 = ray(f2, f1)  # on the face f2 = 0
    det = R1[0] * R2[1] - R1[1] * R2[0]
    # x = l1 R1 + l2 R2; f2 strict <=> l1 > 0, f1 strict <=> l2 > 0
    xs = [0, R1[0], R2[0], R1[0] + R2[0]]
    ys = [0, R1[1], R2[1], R1[1] + R2[1]]
    (a, b), (_, c) = lattice
    num: Dict[Key, Fraction] = defaultdict(Fraction)
    for i in range(math.ceil(Fraction(min(xs), a)), math.floor(Fraction(max(xs), a)) + 1):
        x = i * a
        base = i * b
        jlo = math.ceil(Fraction(min(ys) - base, c))
        jhi = math.floor(Fraction(max(ys) - base, c))
        for j in range(jlo, jhi + 1):
            y = base + j * c
            l1 = Fraction(x * R2[1] - y * R2[0], det)
            l2 = Fraction(R1[0] * y - R1[1] * x, det)
            if not (0 < l1 <= 1 if strict2 else 0 <= l1 < 1):
                continue
            if not (0 < l2 <= 1 if strict1 else 0 <= l2 < 1):
                continue
            ph = x * r0 + y * r1
            num[(x, y, int((ph - math.floor(ph)) * n))] += 1
    if not strict1 and not strict2:
        # the origin sits in the parallelogram; remove its contribution
        den_p = _den_poly(Counter({R1: 1, R2: 1}))
        for (i, j, _), cc in den_p.items():
            num[(i, j, 0)] -= cc
    return RationalFn2(num, {R1: 1, R2: 1} if R1 != R2 else {R1: 2}, n)


def ray_sum(lattice: Mat2, direction: Tuple[int, int],
            rot: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))) -> RationalFn2:
    """Sum over the lattice points k*r, k >= 1, on the ray through ``direction``."""
    r = _primitive(direction)
    r0, r1 = Fraction(rot[0]), Fraction(rot[1])
    n = math.lcm(r0.denominator, r1.denominator)
    k = 1
    while not intmat.in_hnf(lattice, (k * r[0], k * r[1])):
        k += 1
    r = (k * r[0], k * r[1])
    phase = r[0] * r0 + r[1] * r1
    o = phase.denominator
    num: Dict[Key, Fraction] = defaultdict(Fraction)
    for t in range(1, o + 1):
        ph = t * phase
        num[(t * r[0], t * r[1], int((ph - math.floor(ph)) * n))] += 1
    return RationalFn2(num, {(o * r[0], o * r[1]): 1}, n)


def _sublattice_hnf(sublattice) -> Mat2:
    if sublattice is None or (isinstance(sublattice, str) and sublattice == "identity"):
        return ((1, 0), (0, 1))
    rows = [tuple(int(x) for x in row) for row in sublattice]
    try:
        return intmat.hnf_rows(rows)
    except ValueError as exc:
        raise DomainError("sublattice must be non-singular") from exc


def cone_sum(rho1, rho2, sublattice=None) -> RationalFn2:
    """Sum of u^l v^h over (l, h) in the sublattice with l > 0 and rho1*l < h <= rho2*l.

    ``rho2`` may be ``math.inf``: then the set is l > 0, h > rho1*l.
    """
    rho1 = Fraction(rho1)
    lat = _sublattice_hnf(sublattice)
    if rho2 == INF:
        # h - rho1 l > 0 and l > 0
        return lattice_cone_sum(lat, (-rho1, Fraction(1)), True, (Fraction(1), Fraction(0)), True)
    rho2 = Fraction(rho2)
    if rho2 < 0 or not (-rho2 < rho1 <= rho2):
        raise DomainError("cone_sum needs -rho2 < rho1 <= rho2 and rho2 >= 0")
    if rho1 == rho2:
        return RationalFn2.zero()
    return lattice_cone_sum(lat, (-rho1, Fraction(1)), True, (rho2, Fraction(-1)), False)


# ----------------------------------------------------------------------------
# sums over cones of the dual module, described by s = nu'/nu


@dataclass(frozen=True)
class Slopes:
    rho: Union[Fraction, float]
    rho_plus: Union[Fraction, float]


def _ratio(num: QuadNum, den: QuadNum):
    if den.is_zero():
        return INF
    q = num / den
    assert q.is_rational()
    return q.a


def slopes(frame: ThetaFrame, beta) -> Slopes:
    """rho = t(beta/delta)/t(beta/(theta delta)), rho+ = t(beta)/t(beta/theta)."""
    beta = frame.num(beta)
    if not beta > 0:
        raise DomainError("slopes need beta > 0")
    th_inv = frame.theta.inverse()
    di = frame.delta.inverse()
    rho = _ratio(frame.num((beta * di).trace()), frame.num((th_inv * beta * di).trace()))
    rho_plus = _ratio(frame.num(beta.trace()), frame.num((th_inv * beta).trace()))
    out = Slopes(rho, rho_plus)
    th = frame.theta
    bc = beta.conj()
    if beta > bc > 0:
        ok = rho > 0 and th > rho and rho_plus != INF and frame.num(rho_plus) > th
        if not (ok and frame.num(rho) < th):
            raise AssertionError(f"slope ordering fails for {beta}")
    elif beta > -bc > 0:
        ok = rho_plus > 0 and rho != INF and frame.num(rho) > th and frame.num(rho_plus) < th
        if not ok:
            raise AssertionError(f"slope ordering fails for {beta}")
    return out


def _lattice_coords(frame: ThetaFrame, L: ZModule) -> Mat2:
    """HNF of a Z-module of K in (l, h) = (t(nu B0), t(nu B1)) coordinates."""
    rows = []
    for b in L.basis:
        l, h = frame.dual.coordinates(b)
        if l.denominator != 1 or h.denominator != 1:
            raise DomainError("module is not contained in the dual of M")
        rows.append((int(l), int(h)))
    return intmat.hnf_rows(rows)


def _boundary_form(frame: ThetaFrame, e: QuadNum) -> Tuple[Fraction, Fraction]:
    """Rational form L(l, h) with sign L = sign(nu' - e nu) for every nu."""
    s0, s1 = frame.dual.dual_basis
    c0 = s0.conj() - e * s0
    c1 = s1.conj() - e * s1
    if c1.is_zero():
        return (Fraction(c0.sign()), Fraction(0))
    q = c0 / c1
    if not q.is_rational():
        raise DomainError(f"boundary nu' = ({e}) nu is not a rational line")
    return (q.a * c1.sign(), Fraction(c1.sign()))


def s_interval_sum(frame: ThetaFrame, L: ZModule, lo: QuadNum, lo_incl: bool,
                   hi: QuadNum, hi_incl: bool, rot=(Fraction(0), Fraction(0))) -> RationalFn2:
    """Sum of e(rot.(l,h)) u^l v^h over nu in L with nu > 0 and lo < nu'/nu < hi
    (endpoints included when flagged)."""
    if lo > hi or (lo == hi and not (lo_incl and hi_incl)):
        return RationalFn2.zero()
    lat = _lattice_coords(frame, L)
    flo = _boundary_form(frame, lo)
    if lo == hi:
        # the single ray nu' = lo*nu with nu > 0
        d = (flo[1], -flo[0])
        if frame.dual.from_coordinates(d[0], d[1]) < 0:
            d = (-d[0], -d[1])
        return ray_sum(lat, _primitive(d), rot)
    fhi = _boundary_form(frame, hi)
    return lattice_cone_sum(lat, flo, not lo_incl, (-fhi[0], -fhi[1]), not hi_incl, rot)


@dataclass(frozen=True)
class _SideInterval:
    """s-interval with one end at 0 (excluded) and far end ``e``."""

    e: QuadNum
    incl: bool


def _signed_difference(t1: _SideInterval, t2: _SideInterval):
    """(sign, lo, lo_incl, hi, hi_incl) describing t1 - t2 as an indicator, or None."""
    s1, s2 = t1.e.sign(), t2.e.sign()
    if s1 != s2:
        raise DomainError("intervals on opposite sides of 0")
    a1, a2 = abs(t1.e), abs(t2.e)
    if a1 == a2:
        if t1.incl == t2.incl:
            return None
        sign = 1 if t1.incl else -1
        return (sign, t1.e, True, t1.e, True)
    if a1 > a2:
        sign, near, near_in, far, far_in = 1, t2.e, not t2.incl, t1.e, t1.incl
    else:
        sign, near, near_in, far, far_in = -1, t1.e, not t1.incl, t2.e, t2.incl
    if s1 > 0:
        return (sign, near, near_in, far, far_in)
    return (sign, far, far_in, near, near_in)


def r_fn(frame: ThetaFrame, alpha, beta, N: Optional[ZModule] = None,
         variant: str = "minus") -> RationalFn2:
    """R_{alpha,beta,N} (variant 'minus') or R+_{alpha,beta,N} (variant 'plus').

    The sum is over nu in beta*N^* with nu/beta-twisted weights e(t(nu alpha/beta)),
    restricted to the difference of the sign cone for f_{beta^-1 N} (or f+) and the
    image under beta of the sign cone for f_N (or f+_N), which is a rational cone.
    """
    alpha, beta = frame.num(alpha), frame.num(beta)
    N = N or frame.module
    if not beta > 0:
        raise DomainError("r_fn needs beta > 0")
    if variant not in ("minus", "plus"):
        raise InputError("variant must be 'minus' or 'plus'")
    from .lattice import stabiliser  # local: avoid a cycle in type-only use

    S = stabiliser(N)
    if not S.contains(beta):
        raise DomainError(f"{beta} is not in the stabiliser order of N")
    one = frame.num(1)
    ratio = beta.conj() / beta
    in_splus = beta.conj() > 0
    if variant == "minus":
        t1 = _SideInterval(-one, False)  # f: -1 < s < 0
        # f_N (S+) or f+_N (S-+) at u^beta, seen in nu = beta mu coordinates
        t2 = _SideInterval(-ratio, False) if in_splus else _SideInterval(ratio, True)
    else:
        t1 = _SideInterval(one, True)  # f+: 0 < s <= 1
        t2 = _SideInterval(ratio, True) if in_splus else _SideInterval(-ratio, False)
    diff = _signed_difference(t1, t2)
    if diff is None:
        return RationalFn2.zero()
    sign, lo, lo_in, hi, hi_in = diff
    lam = N.dual().dual_module().scale(beta)
    rot = frame.dual.rotation(alpha / beta)
    out = s_interval_sum(frame, lam, lo, lo_in, hi, hi_in, rot)
    return out if sign > 0 else -out


def theta_fn(frame: ThetaFrame, N: Optional[ZModule] = None) -> RationalFn2:
    """Theta_N: sum over nu in N^* with nu > 0 and -1 < nu'/nu <= 1."""
    N = N or frame.module
    one = frame.num(1)
    return s_interval_sum(frame, N.dual().dual_module(), -one, False, one, True)


def r_eta(frame: ThetaFrame, N: Optional[ZModule] = None, plus: bool = False,
          eta: Optional[QuadNum] = None) -> RationalFn2:
    """Shell function R_{eta,N} (or R+_{eta,N}) of the positive unit."""
    eta = eta or frame.eta
    return r_fn(frame, 0, eta, N, "plus" if plus else "minus")


def gauss_average_check(frame: ThetaFrame, beta, eta=None) -> bool:
    """sum over kernel(beta) of twisted R_{eta,M} equals |n(beta)| R_{eta, beta^-1 M}."""
    beta = frame.num(beta)
    eta = frame.num(eta) if eta is not None else frame.eta
    base = r_fn(frame, 0, eta, frame.module, "minus")
    lhs = RationalFn2.zero()
    for z in kernel(frame, beta):
        lhs = lhs + twist(base, z)
    Nb = frame.module.scale(beta.inverse())
    rhs = r_fn(frame, 0, eta, Nb, "minus").scale(abs(beta.norm()))
    return rf_equal(lhs, rhs)
