"""Complete Z-modules of a real quadratic field.

A ``ZModule`` keeps the ordered basis it was built from (the torus action
depends on it) and, separately, a Hermite normal form over (1, sqrt d) that
decides equality and membership.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import List, Sequence, Tuple

from . import intmat
from .errors import DomainError, InputError
from .qfield import QuadNum


def _lcm_den(values: Sequence[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


class ZModule:
    """Rank-2 Z-module Z*B0 + Z*B1 inside Q(sqrt d), with its ordered basis."""

    def __init__(self, basis: Tuple[QuadNum, QuadNum]):
        b0, b1 = basis
        if not isinstance(b0, QuadNum) or not isinstance(b1, QuadNum):
            raise InputError("ZModule basis entries must be QuadNum")
        if b0.d != b1.d:
            raise DomainError("basis elements from different fields")
        self.basis = (b0, b1)
        self.d = b0.d
        if self._det() == 0:
            raise DomainError("basis elements are linearly dependent over Q")

    # coordinates over (1, sqrt d)
    def _det(self) -> Fraction:
        b0, b1 = self.basis
        return b0.a * b1.b - b0.b * b1.a

    @cached_property
    def hnf(self) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
        """Canonical basis rows ((h00, h01), (0, h11)) over (1, sqrt d)."""
        rows = [(b.a, b.b) for b in self.basis]
        den = _lcm_den([x for r in rows for x in r])
        ints = [(int(x * den), int(y * den)) for x, y in rows]
        (a, b), (_, c) = intmat.hnf_rows(ints)
        return ((Fraction(a, den), Fraction(b, den)), (Fraction(0), Fraction(c, den)))

    def __eq__(self, other):
        if not isinstance(other, ZModule):
            return NotImplemented
        return self.d == other.d and self.hnf == other.hnf

    def __hash__(self):
        return hash((self.d, self.hnf))

    def __repr__(self):
        return f"ZModule(({self.basis[0]}, {self.basis[1]}))"

    def coords(self, x: QuadNum) -> Tuple[Fraction, Fraction]:
        """Rational (c0, c1) with x = c0*B0 + c1*B1."""
        b0, b1 = self.basis
        det = self._det()
        c0 = (x.a * b1.b - x.b * b1.a) / det
        c1 = (b0.a * x.b - b0.b * x.a) / det
        return c0, c1

    def contains(self, x: QuadNum) -> bool:
        c0, c1 = self.coords(x)
        return c0.denominator == 1 and c1.denominator == 1

    def __contains__(self, x: QuadNum) -> bool:
        return self.contains(x)

    def is_submodule_of(self, other: "ZModule") -> bool:
        return all(other.contains(b) for b in self.basis)

    def element(self, c0: int, c1: int) -> QuadNum:
        return self.basis[0] * c0 + self.basis[1] * c1

    def covolume(self) -> Fraction:
        """|det| of the basis over (1, sqrt d)."""
        return abs(self._det())

    def reduce(self, x: QuadNum) -> QuadNum:
        """Canonical representative of x modulo this module."""
        (h00, h01), (_, h11) = self.hnf
        k0 = math.floor(x.a / h00)
        ya, yb = x.a - k0 * h00, x.b - k0 * h01
        k1 = math.floor(yb / h11)
        return QuadNum(ya, yb - k1 * h11, self.d)

    def scale(self, nu: QuadNum) -> "ZModule":
        if nu.is_zero():
            raise DomainError("cannot scale a module by 0")
        return ZModule((nu * self.basis[0], nu * self.basis[1]))

    def dual(self) -> "DualData":
        return dual(self)

    def to_json(self) -> dict:
        return {"basis": [b.to_json() for b in self.basis]}

    @classmethod
    def from_json(cls, obj, d: int | None = None) -> "ZModule":
        try:
            b0, b1 = obj["basis"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad module {obj!r}") from exc
        return cls((QuadNum.from_json(b0, d), QuadNum.from_json(b1, d)))


@dataclass(frozen=True)
class DualData:
    """Trace-dual basis of a framed module.

    ``goth_b`` has rows (B_i*, B_i*') and is the inverse of
    [[B0, B1], [B0', B1']].
    """

    module: ZModule
    dual_basis: Tuple[QuadNum, QuadNum]
    goth_b: Tuple[Tuple[QuadNum, QuadNum], Tuple[QuadNum, QuadNum]]

    def dual_module(self) -> ZModule:
        return ZModule(self.dual_basis)

    def rotation(self, alpha: QuadNum) -> Tuple[Fraction, Fraction]:
        """(t(B0* alpha), t(B1* alpha)): exponents of Phi(alpha, alpha')."""
        return tuple((b * alpha).trace() for b in self.dual_basis)

    def coordinates(self, nu: QuadNum) -> Tuple[Fraction, Fraction]:
        """(l, h) = (t(nu B0), t(nu B1)), so nu = l B0* + h B1*."""
        return tuple((nu * b).trace() for b in self.module.basis)

    def from_coordinates(self, l, h) -> QuadNum:
        return self.dual_basis[0] * l + self.dual_basis[1] * h


def disc_sqrt(M: ZModule) -> QuadNum:
    """B0*B1' - B1*B0' for the ordered basis of M."""
    b0, b1 = M.basis
    return b0 * b1.conj() - b1 * b0.conj()


def dual(M: ZModule) -> DualData:
    b0, b1 = M.basis
    delta = disc_sqrt(M)
    s0 = b1.conj() / delta
    s1 = -b0.conj() / delta
    goth = ((s0, s0.conj()), (s1, s1.conj()))
    return DualData(M, (s0, s1), goth)


def stabiliser(M: ZModule) -> ZModule:
    """The order {beta : beta*M subset of M}.

    With tau = B0/B1 a root of the primitive integer form A x^2 + B x + C,
    the order is Z + A*tau*Z.
    """
    b0, b1 = M.basis
    tau = b0 / b1
    # tau^2 - t*tau + n = 0
    t, n = tau.trace(), tau.norm()
    den = math.lcm(t.denominator, n.denominator)
    A, B, C = den, int(-t * den), int(n * den)
    g = math.gcd(math.gcd(A, B), C)
    A = A // g
    return ZModule((tau.rational(1), tau * A))


def contains(M: ZModule, x: QuadNum) -> bool:
    return M.contains(x)


def index(N: ZModule, M: ZModule) -> Fraction:
    """Generalised index [N : M] = covol(M)/covol(N)."""
    return M.covolume() / N.covolume()


def scale(M: ZModule, nu: QuadNum) -> ZModule:
    return M.scale(nu)


def coset_reps(N: ZModule, M: ZModule) -> List[QuadNum]:
    """Representatives of N/M, reduced canonically modulo M."""
    if not M.is_submodule_of(N):
        raise DomainError("coset_reps needs M contained in N")
    rows = []
    for b in M.basis:
        c0, c1 = N.coords(b)
        rows.append((int(c0), int(c1)))
    (a, _), (_, c) = intmat.hnf_rows(rows)
    reps = []
    for i in range(a):
        for j in range(c):
            reps.append(M.reduce(N.element(i, j)))
    return reps
