"""Exact arithmetic in a real quadratic field Q(sqrt d).

Elements are ``QuadNum(a, b, d)`` meaning a + b*sqrt(d) with the
embedding in which sqrt(d) > 0.  Continued fractions of quadratic
irrationals are computed with the (P, Q, D) surd recurrence, so no
floating point ever enters a sign or floor decision.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import List, Tuple, Union

from . import intmat
from .errors import DomainError, InputError
from .intmat import Mat2

RationalLike = Union[int, Fraction]


@lru_cache(maxsize=None)
def _check_squarefree(d: int) -> int:
    if not isinstance(d, int) or d <= 1:
        raise DomainError(f"d must be a square-free integer > 1, got {d!r}")
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            raise DomainError(f"d={d} is not square-free")
        p += 1
    return d


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


class QuadNum:
    """Immutable element a + b*sqrt(d) of Q(sqrt d)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0, d: int = 2):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))
        object.__setattr__(self, "d", _check_squarefree(d))

    def __setattr__(self, name, value):
        raise AttributeError("QuadNum is immutable")

    # construction helpers
    @classmethod
    def sqrt(cls, d: int) -> "QuadNum":
        return cls(0, 1, d)

    def _coerce(self, other) -> "QuadNum":
        if isinstance(other, QuadNum):
            if other.d != self.d:
                raise DomainError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNum(other, 0, self.d)
        return NotImplemented

    def rational(self, x: RationalLike) -> "QuadNum":
        """The rational x as an element of this field."""
        return QuadNum(x, 0, self.d)

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNum(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a * o.a + self.d * self.b * o.b,
                       self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadNum":
        n = self.norm()
        if n == 0:
            raise DomainError("division by zero in Q(sqrt d)")
        return QuadNum(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadNum(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # Galois structure
    def conj(self) -> "QuadNum":
        return QuadNum(self.a, -self.b, self.d)

    def trace(self) -> Fraction:
        return 2 * self.a

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def is_rational(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d) as a real number."""
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d*b^2
        lhs, rhs = a * a, self.d * b * b
        return sa if lhs > rhs else sb

    # comparisons use the real embedding
    def __eq__(self, other):
        if isinstance(other, QuadNum):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QuadNum with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return not self.is_zero()

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def to_mpf(self):
        """Value as an mpmath real at the current working precision."""
        import mpmath

        return mpmath.mpf(self.a.numerator) / self.a.denominator + \
            mpmath.mpf(self.b.numerator) / self.b.denominator * mpmath.sqrt(self.d)

    def __repr__(self):
        return f"QuadNum({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        s = "" if self.a == 0 else f"{self.a}"
        coef = self.b
        sq = f"sqrt({self.d})"
        if coef == 1:
            t = sq
        elif coef == -1:
            t = "-" + sq
        else:
            t = f"{coef}*{sq}"
        if s and not t.startswith("-"):
            return f"{s}+{t}"
        return s + t

    # literal grammar
    def to_literal(self) -> str:
        """Canonical literal (p + q*sqrt(d))/r with r > 0."""
        r = math.lcm(self.a.denominator, self.b.denominator)
        p = self.a.numerator * (r // self.a.denominator)
        q = self.b.numerator * (r // self.b.denominator)
        return f"({p}{'+' if q >= 0 else '-'}{abs(q)}*sqrt({self.d}))/{r}"

    def to_json(self) -> dict:
        return {"a": _frac_str(self.a), "b": _frac_str(self.b), "d": self.d}

    @classmethod
    def from_json(cls, obj, d: int | None = None) -> "QuadNum":
        if isinstance(obj, str):
            return parse_quad(obj, d)
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            if isinstance(obj, float):
                raise InputError("floating point numbers are not accepted as field elements")
            if d is None:
                raise InputError("a rational literal needs the field from context")
            return cls(obj, 0, d)
        try:
            dd = int(obj["d"]) if "d" in obj else d
            if dd is None:
                raise InputError("missing field discriminator 'd'")
            return cls(Fraction(str(obj.get("a", "0"))), Fraction(str(obj.get("b", "0"))), dd)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad quadratic number {obj!r}: {exc}") from exc


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def qsqrt(d: int) -> QuadNum:
    return QuadNum(0, 1, d)


# ----------------------------------------------------------------------------
# literal parser: integers, sqrt(n), + - * / and parentheses

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt)|(.))")


def _squarefree_part(n: int) -> Tuple[int, int]:
    """n = k^2 * m with m square-free; returns (k, m)."""
    k, m, p = 1, n, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        p += 1
    return k, m


def parse_quad(text: str, d: int | None = None) -> QuadNum:
    """Parse a literal such as ``(p + q*sqrt(d))/r``.

    Accepts general expressions built from integers, ``sqrt(n)``, ``+ - * /``
    and parentheses.  The Unicode minus sign is accepted.  A literal with no
    square root needs ``d`` from context.
    """
    src = text.replace("−", "-").replace("√", "sqrt")
    toks = []
    for num, sq, ch in _TOKEN.findall(src):
        if num:
            toks.append(("n", int(num)))
        elif sq:
            toks.append(("s", None))
        elif ch.strip():
            toks.append(("o", ch))
    pos = 0
    found_d = set()

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take(kind=None, val=None):
        nonlocal pos
        t = peek()
        if t[0] is None or (kind and t[0] != kind) or (val and t[1] != val):
            raise InputError(f"cannot parse quadratic literal {text!r}")
        pos += 1
        return t

    # values are (a, b, m): a + b*sqrt(m); m=None for pure rationals
    def combine(x, y):
        m = x[2] or y[2]
        if x[2] and y[2] and x[2] != y[2]:
            raise InputError(f"mixed square roots in {text!r}")
        return m

    def expr():
        v = term()
        while peek() in (("o", "+"), ("o", "-")):
            op = take()[1]
            w = term()
            m = combine(v, w)
            s = 1 if op == "+" else -1
            v = (v[0] + s * w[0], v[1] + s * w[1], m)
        return v

    def term():
        v = unary()
        while peek() in (("o", "*"), ("o", "/")):
            op = take()[1]
            w = unary()
            m = combine(v, w)
            mm = m or 1
            if op == "*":
                v = (v[0] * w[0] + mm * v[1] * w[1], v[0] * w[1] + v[1] * w[0], m)
            else:
                n = w[0] * w[0] - mm * w[1] * w[1]
                if n == 0:
                    raise DomainError(f"division by zero in {text!r}")
                ia, ib = w[0] / n, -w[1] / n
                v = (v[0] * ia + mm * v[1] * ib, v[0] * ib + v[1] * ia, m)
        return v

    def unary():
        if peek() == ("o", "-"):
            take()
            v = unary()
            return (-v[0], -v[1], v[2])
        if peek() == ("o", "+"):
            take()
            return unary()
        return atom()

    def atom():
        t = peek()
        if t[0] == "n":
            take()
            return (Fraction(t[1]), Fraction(0), None)
        if t[0] == "s":
            take()
            take("o", "(")
            n = take("n")[1]
            take("o", ")")
            k, m = _squarefree_part(n)
            if m == 1:
                return (Fraction(k), Fraction(0), None)
            found_d.add(m)
            return (Fraction(0), Fraction(k), m)
        if t == ("o", "("):
            take()
            v = expr()
            take("o", ")")
            return v
        raise InputError(f"cannot parse quadratic literal {text!r}")

    val = expr()
    if pos != len(toks):
        raise InputError(f"trailing input in quadratic literal {text!r}")
    m = val[2]
    if m is None:
        m = d
        if m is None:
            raise InputError(f"literal {text!r} has no sqrt and no field was given")
    elif d is not None and d != m:
        raise DomainError(f"literal {text!r} lives in Q(sqrt {m}), expected Q(sqrt {d})")
    return QuadNum(val[0], val[1], m)


# ----------------------------------------------------------------------------
# floors and continued fractions


def floor_scaled(l: int, w: QuadNum) -> int:
    """floor(l*w), decided by exact sign tests."""
    x = w * l
    if x.b == 0:
        return math.floor(x.a)
    # integer approximation of b*sqrt(d), then fix up by sign tests
    b2d = x.b * x.b * x.d
    root = math.isqrt(b2d.numerator // b2d.denominator)
    guess = math.floor(x.a + (root if x.b > 0 else -root - 1))
    while (x - guess).sign() < 0:
        guess -= 1
    while (x - (guess + 1)).sign() >= 0:
        guess += 1
    return guess


@dataclass(frozen=True)
class CFExpansion:
    """Continued fraction of 1/w for 0 < w < 1, i.e. w = [0; preperiod, period...]."""

    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]

    def value(self, d: int) -> QuadNum:
        """Reconstruct w exactly from the digits."""
        # fixed point y of the period: y = [b0; b1, ..., y]
        p = _cf_matrix(self.period)
        (pn, pn1), (qn, qn1) = p
        # qn*y^2 + (qn1 - pn)*y - pn1 = 0, positive root
        disc = (qn1 - pn) ** 2 + 4 * qn * pn1
        root = _rational_sqrt_in(Fraction(disc), d)
        y = (QuadNum(pn - qn1, 0, d) + root) / (2 * qn)
        x = y
        for digit in reversed(self.preperiod):
            x = digit + x.inverse()
        return x.inverse()


def _cf_matrix(digits) -> Mat2:
    out = intmat.IDENTITY
    for b in digits:
        out = intmat.mul(out, ((b, 1), (1, 0)))
    return out


def _rational_sqrt_in(r: Fraction, d: int) -> QuadNum:
    """The positive element c*sqrt(d) whose square is r."""
    q = r / d
    num, den = q.numerator, q.denominator
    sn, sd = math.isqrt(num), math.isqrt(den)
    if num < 0 or sn * sn != num or sd * sd != den:
        raise DomainError(f"{r} is not d times a rational square for d={d}")
    return QuadNum(0, Fraction(sn, sd), d)


def _surd_state(x: QuadNum) -> Tuple[int, int, int]:
    """Write x = (P + sqrt(D))/Q with integers and Q | D - P^2."""
    r = math.lcm(x.a.denominator, x.b.denominator)
    p1 = x.a.numerator * (r // x.a.denominator)
    p2 = x.b.numerator * (r // x.b.denominator)
    q = r
    if p2 < 0:
        p1, p2, q = -p1, -p2, -q
    P, D, Q = p1, p2 * p2 * x.d, q
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    return P, Q, D


def _surd_floor(P: int, Q: int, D: int, s: int) -> int:
    """floor((P + sqrt D)/Q) where s = isqrt(D) and D is not a square."""
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // (-Q)) - 1


def cf_expand(w: QuadNum) -> CFExpansion:
    """Continued fraction of an irrational 0 < w < 1.

    Returns the minimal preperiod and a period of even length (a minimal odd
    period is repeated once).
    """
    if w.is_rational():
        raise DomainError("rational numbers have no periodic continued fraction")
    if not (0 < w < 1):
        raise DomainError("cf_expand needs 0 < w < 1")
    P, Q, D = _surd_state(w.inverse())
    s = math.isqrt(D)
    seen = {}
    digits: List[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(digits)
        a = _surd_floor(P, Q, D, s)
        digits.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    pre, per = tuple(digits[:start]), tuple(digits[start:])
    if len(per) % 2:
        per = per + per
    return CFExpansion(pre, per)


def is_perron(theta: QuadNum) -> bool:
    """0 < theta < 1 and theta' < -1."""
    if theta.is_rational():
        return False
    return 0 < theta < 1 and theta.conj() < -1


@dataclass(frozen=True)
class ReductionResult:
    theta: QuadNum
    matD: Mat2
    matT: Mat2


def mobius(m: Mat2, x: QuadNum) -> QuadNum:
    (a, b), (c, d) = m
    return (x * a + b) / (x * c + d)


def reduce_w(w: QuadNum) -> ReductionResult:
    """Reduce w > 0 to a Perron number theta with w = D(theta) as a Mobius map.

    T is the monomial matrix carrying the staircase of slope w to the one of
    slope theta: one factor [[d_i,1],[1,0]] per preperiod digit, applied in
    order, preceded by [[1,n],[0,1]] when w has integer part n > 0.
    """
    if w.is_rational():
        raise DomainError("reduce_w needs an irrational w")
    if not w > 0:
        raise DomainError("reduce_w needs w > 0")
    n = floor_scaled(1, w)
    frac = w - n
    cf = cf_expand(frac)
    matD = ((1, n), (0, 1))
    matT = ((1, n), (0, 1))
    for digit in cf.preperiod:
        matD = intmat.mul(matD, ((0, 1), (1, digit)))
        matT = intmat.mul(((digit, 1), (1, 0)), matT)
    # invert the short preperiod map instead of rebuilding theta from a
    # period that can have many thousands of digits
    theta = mobius(intmat.inverse(matD), w)
    if not is_perron(theta):
        raise AssertionError("reduction did not reach a purely periodic expansion")
    return ReductionResult(theta, matD, matT)


def positive_unit(theta: QuadNum) -> QuadNum:
    """Totally positive unit from one even period of the continued fraction of 1/theta."""
    if not is_perron(theta):
        raise DomainError("positive_unit needs a Perron number")
    cf = cf_expand(theta)
    (_, _), (qn, qn1) = _cf_matrix(cf.period)
    return theta.inverse() * qn + qn1
