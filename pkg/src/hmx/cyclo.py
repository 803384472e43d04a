"""Exact arithmetic with elements of cyclotomic fields Q(zeta_n).

Inside rational functions the coefficients are kept in the group ring
Q[Z/n] (a dict power -> rational), where multiplying by a root of unity is a
shift.  Reduction modulo the cyclotomic polynomial gives the canonical
power-basis coordinates used for equality and serialisation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import mpmath


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> Tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(num: List[int], den: List[int]) -> List[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        assert r == 0
        out[i] = q
        if q:
            for j, c in enumerate(den):
                num[i + j] -= q * c
    assert not any(num[: len(den) - 1])
    return out


def phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Row k holds the coordinates of zeta_n^k in the basis 1, zeta, ..., zeta^(phi-1)."""
    poly = cyclotomic_poly(n)
    deg = len(poly) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x and reduce with x^deg = -sum poly[i] x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * poly[i]
    return tuple(rows)


def reduce_group_ring(vec: Dict[int, Fraction], n: int) -> Tuple[Fraction, ...]:
    """Power-basis coordinates of sum vec[k] zeta_n^k."""
    table = _power_table(n)
    deg = len(table[0])
    out = [Fraction(0)] * deg
    for k, c in vec.items():
        if c:
            row = table[k % n]
            for i, t in enumerate(row):
                if t:
                    out[i] += c * t
    return tuple(out)


@dataclass(frozen=True)
class CycloCoeff:
    """Element of Q(zeta_n) in power-basis coordinates."""

    order: int
    coords: Tuple[Fraction, ...]

    @classmethod
    def from_group_ring(cls, vec: Dict[int, Fraction], n: int) -> "CycloCoeff":
        return cls(n, reduce_group_ring(vec, n))

    @classmethod
    def rational(cls, x) -> "CycloCoeff":
        return cls(1, (Fraction(x),))

    @classmethod
    def root_of_unity(cls, r: Fraction) -> "CycloCoeff":
        """e(r) for a rational r."""
        r = Fraction(r)
        n = r.denominator
        return cls.from_group_ring({r.numerator % n: Fraction(1)}, n)

    def group_ring(self) -> Dict[int, Fraction]:
        return {k: c for k, c in enumerate(self.coords) if c}

    def lift(self, m: int) -> "CycloCoeff":
        if m % self.order:
            raise ValueError(f"order {self.order} does not divide {m}")
        s = m // self.order
        return CycloCoeff.from_group_ring({k * s: c for k, c in self.group_ring().items()}, m)

    def _common(self, other: "CycloCoeff"):
        m = math.lcm(self.order, other.order)
        return self.lift(m), other.lift(m), m

    def __add__(self, other: "CycloCoeff") -> "CycloCoeff":
        a, b, m = self._common(other)
        return CycloCoeff(m, tuple(x + y for x, y in zip(a.coords, b.coords)))

    def __neg__(self):
        return CycloCoeff(self.order, tuple(-x for x in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloCoeff(self.order, tuple(x * other for x in self.coords))
        a, b, m = self._common(other)
        prod: Dict[int, Fraction] = {}
        for i, x in a.group_ring().items():
            for j, y in b.group_ring().items():
                k = (i + j) % m
                prod[k] = prod.get(k, 0) + x * y
        return CycloCoeff.from_group_ring(prod, m)

    __rmul__ = __mul__

    def inverse(self) -> "CycloCoeff":
        """Multiplicative inverse, by solving x * y = 1 in power-basis coordinates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0 in a cyclotomic field")
        n, deg = self.order, len(self.coords)
        table = _power_table(n)
        # column j of the multiplication matrix is x * zeta^j
        cols = []
        for j in range(deg):
            col = [Fraction(0)] * deg
            for k, c in self.group_ring().items():
                for i, t in enumerate(table[(k + j) % n]):
                    col[i] += c * t
            cols.append(col)
        aug = [[cols[j][i] for j in range(deg)] + [Fraction(int(i == 0))] for i in range(deg)]
        for c in range(deg):
            piv = next(r for r in range(c, deg) if aug[r][c])
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for r in range(deg):
                if r != c and aug[r][c]:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return CycloCoeff(n, tuple(row[-1] for row in aug))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloCoeff.rational(other)
        if not isinstance(other, CycloCoeff):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coords == b.coords

    __hash__ = None

    def to_complex(self, prec: int = 53):
        with mpmath.workprec(prec + 10):
            z = mpmath.mpc(0)
            for k, c in enumerate(self.coords):
                if c:
                    z += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(mpmath.mpf(2 * k) / self.order)
        return z

    def to_json(self) -> dict:
        return {"order": self.order, "coords": [f"{c.numerator}/{c.denominator}" for c in self.coords]}

    @classmethod
    def from_json(cls, obj) -> "CycloCoeff":
        n = int(obj["order"])
        coords = tuple(Fraction(str(c)) for c in obj["coords"])
        if len(coords) != phi(n):
            raise ValueError(f"order {n} needs {phi(n)} coordinates")
        return cls(n, coords)
