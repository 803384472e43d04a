"""Points of the torus G_m^2, the exponential map of a framed module and the
algebraic action of its stabiliser order by integer matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Tuple, Union

import mpmath

from . import intmat
from .errors import DomainError, InputError, NotInOrder
from .intmat import Mat2
from .lattice import DualData, ZModule, coset_reps, disc_sqrt, dual, stabiliser
from .qfield import QuadNum, is_perron, parse_quad, positive_unit


class ThetaFrame:
    """The framed module M = Z*theta^-1 + Z*1 attached to a Perron number theta."""

    def __init__(self, theta: QuadNum):
        if not is_perron(theta):
            raise DomainError(f"{theta} does not satisfy 0 < theta < 1, theta' < -1")
        self.theta = theta
        self.d = theta.d
        self.module = ZModule((theta.inverse(), theta.rational(1)))
        self.dual = dual(self.module)
        self.delta = disc_sqrt(self.module)

    @cached_property
    def order(self) -> ZModule:
        return stabiliser(self.module)

    @cached_property
    def eta(self) -> QuadNum:
        return positive_unit(self.theta)

    def num(self, x) -> QuadNum:
        """Coerce an int, Fraction, literal string or QuadNum into the field."""
        if isinstance(x, QuadNum):
            if x.d != self.d:
                raise DomainError("element from a different field")
            return x
        if isinstance(x, str):
            return parse_quad(x, self.d)
        return QuadNum(x, 0, self.d)

    def __repr__(self):
        return f"ThetaFrame({self.theta})"


FrameLike = Union[DualData, ThetaFrame]


def _dual_of(frame: FrameLike) -> DualData:
    return frame.dual if isinstance(frame, ThetaFrame) else frame


# ----------------------------------------------------------------------------
# torus points


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class Torsion:
    """Phi(alpha, alpha') for alpha in K, stored as alpha mod M."""

    alpha: QuadNum
    frame: DualData = field(compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", self.frame.module.reduce(self.alpha))

    def rotation(self) -> Tuple[Fraction, Fraction]:
        """Rotation numbers in [0, 1): the point is (e(r0), e(r1))."""
        r0, r1 = self.frame.rotation(self.alpha)
        return (_mod1(r0), _mod1(r1))

    def order(self) -> int:
        r0, r1 = self.rotation()
        return math.lcm(r0.denominator, r1.denominator)

    def is_identity(self) -> bool:
        return self.alpha.is_zero()

    def __add__(self, other: "Torsion") -> "Torsion":
        return Torsion(self.alpha + other.alpha, self.frame)

    def to_numeric(self, prec: int = 53) -> "Numeric":
        with mpmath.workprec(prec + 10):
            u, v = (mpmath.expjpi(2 * mpmath.mpf(r.numerator) / r.denominator)
                    for r in self.rotation())
        return Numeric(u, v, prec)

    def to_json(self) -> dict:
        return {"torsion": {"alpha": self.alpha.to_json()}}


@dataclass(frozen=True)
class Numeric:
    u: mpmath.mpc
    v: mpmath.mpc
    prec: int = 53

    def __post_init__(self):
        with mpmath.workprec(self.prec + 16):
            object.__setattr__(self, "u", mpmath.mpc(self.u))
            object.__setattr__(self, "v", mpmath.mpc(self.v))

    def to_json(self) -> dict:
        def cx(z):
            return [mpmath.nstr(z.real, self.prec // 3 + 3), mpmath.nstr(z.imag, self.prec // 3 + 3)]
        return {"numeric": {"u": cx(self.u), "v": cx(self.v)}}


@dataclass(frozen=True)
class Coset:
    """Phi(alpha, alpha') * base^beta for a named base point."""

    alpha: QuadNum
    beta: QuadNum
    base: str = "v1"

    def to_json(self) -> dict:
        return {"coset": {"alpha": self.alpha.to_json(), "beta": self.beta.to_json(),
                          "base": self.base}}


TorusPoint = Union[Torsion, Numeric, Coset]


def point_from_json(obj, frame: FrameLike, prec: int = 53) -> TorusPoint:
    fr = _dual_of(frame)
    d = fr.module.d
    try:
        if "torsion" in obj:
            return Torsion(QuadNum.from_json(obj["torsion"]["alpha"], d), fr)
        if "numeric" in obj:
            with mpmath.workprec(prec + 16):
                u = mpmath.mpc(*obj["numeric"]["u"])
                v = mpmath.mpc(*obj["numeric"]["v"])
            return Numeric(u, v, prec)
        if "coset" in obj:
            c = obj["coset"]
            return Coset(QuadNum.from_json(c["alpha"], d), QuadNum.from_json(c["beta"], d),
                         c.get("base", "v1"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad torus point {obj!r}") from exc
    raise InputError(f"unknown torus point form {obj!r}")


# ----------------------------------------------------------------------------
# exponential map and action


def phi_eval(frame: FrameLike, z, zc, prec: int = 53) -> Numeric:
    """(e(B0* z + B0*' z'), e(B1* z + B1*' z'))."""
    if prec < 32:
        raise DomainError("prec must be at least 32 bits")
    fr = _dual_of(frame)
    with mpmath.workprec(prec + 16):
        z, zc = mpmath.mpc(z), mpmath.mpc(zc)
        out = []
        for s in fr.dual_basis:
            arg = s.to_mpf() * z + s.conj().to_mpf() * zc
            out.append(mpmath.exp(2j * mpmath.pi * arg))
    return Numeric(out[0], out[1], prec)


@dataclass(frozen=True)
class ActionMatrix:
    m: Mat2
    nu: Optional[QuadNum] = None

    def __mul__(self, other: "ActionMatrix") -> "ActionMatrix":
        nu = None if self.nu is None or other.nu is None else self.nu * other.nu
        return ActionMatrix(intmat.mul(self.m, other.m), nu)

    def __pow__(self, k: int) -> "ActionMatrix":
        nu = None if self.nu is None else self.nu ** k
        return ActionMatrix(intmat.power(self.m, k), nu)

    def det(self) -> int:
        return intmat.det(self.m)


def action_matrix(frame: FrameLike, nu) -> ActionMatrix:
    """B(nu)_{ij} = t(nu B_i* B_j); integral exactly when nu is in S(M)."""
    fr = _dual_of(frame)
    if not isinstance(nu, QuadNum):
        nu = QuadNum(nu, 0, fr.module.d)
    if nu.is_zero():
        raise NotInOrder("0 does not act invertibly")
    rows = []
    for s in fr.dual_basis:
        row = []
        for b in fr.module.basis:
            t = (nu * s * b).trace()
            if t.denominator != 1:
                raise NotInOrder(f"{nu} is not in the stabiliser order of the module")
            row.append(int(t))
        rows.append(tuple(row))
    return ActionMatrix(intmat.mat(rows), nu)


def act(A: Union[ActionMatrix, Mat2], p: TorusPoint) -> TorusPoint:
    """Monomial action (u, v) -> (u^a v^b, u^c v^d)."""
    m = A.m if isinstance(A, ActionMatrix) else A
    (a, b), (c, d) = m
    if isinstance(p, Numeric):
        with mpmath.workprec(p.prec + 16):
            u = p.u ** a * p.v ** b
            v = p.u ** c * p.v ** d
        return Numeric(u, v, p.prec)
    if isinstance(p, Torsion):
        if isinstance(A, ActionMatrix) and A.nu is not None:
            return Torsion(A.nu * p.alpha, p.frame)
        # solve for the element with the transformed rotation numbers
        r0, r1 = p.frame.rotation(p.alpha)
        n0, n1 = a * r0 + b * r1, c * r0 + d * r1
        m0, m1 = p.frame.module.basis
        return Torsion(m0 * n0 + m1 * n1, p.frame)
    raise DomainError("act needs a numeric or torsion point")


def is_analytic(frame: ThetaFrame, nu: QuadNum) -> bool:
    """Sigma(nu) in the cone y >= max(y', (theta'/theta) y') > 0.

    The non-negativity of B(nu) is computed as well and the two criteria must
    agree.
    """
    nu = frame.num(nu)
    th = frame.theta
    y, yc = nu, nu.conj()
    bound = max(yc, th.conj() / th * yc)
    cone = bound > 0 and y >= bound
    mat = action_matrix(frame, nu).m
    nonneg = all(x >= 0 for row in mat for x in row)
    if cone != nonneg:
        raise AssertionError(f"analyticity criteria disagree for {nu}")
    return cone


def _is_root_of_unity_poly(t: int, n: int) -> bool:
    """Does x^2 - t x + n have a root of unity as a root?"""
    if 1 - t + n == 0 or 1 + t + n == 0:
        return True
    return n == 1 and t in (-1, 0, 1)


def is_good(A: Union[ActionMatrix, Mat2]) -> bool:
    """Non-singular, no root-of-unity eigenvalue, positive Perron eigenvector."""
    m = A.m if isinstance(A, ActionMatrix) else A
    (a, b), (c, d) = m
    if min(a, b, c, d) < 0:
        raise DomainError("is_good expects a non-negative matrix")
    t, n = a + d, a * d - b * c
    if n == 0 or _is_root_of_unity_poly(t, n):
        return False
    if b > 0 and c > 0:
        return True  # irreducible: Perron-Frobenius
    if b == 0 and c == 0:
        return a == d  # eigenspace of the top eigenvalue is the whole plane only then
    if b == 0:  # [[a,0],[c,d]]: top eigenvector (a-d, c) when a > d
        return a > d
    return d > a  # [[a,b],[0,d]]: top eigenvector (b, d-a) when d > a


def kernel(frame: FrameLike, beta) -> List[Torsion]:
    """Torsion points killed by u -> u^beta: the classes of beta^-1 M / M."""
    fr = _dual_of(frame)
    M = fr.module
    if not isinstance(beta, QuadNum):
        beta = QuadNum(beta, 0, M.d)
    if beta.is_zero():
        raise DomainError("kernel of 0 is not finite")
    action_matrix(fr, beta)  # membership check
    return [Torsion(a, fr) for a in coset_reps(M.scale(beta.inverse()), M)]


def fixing_unit(frame: ThetaFrame, zetas: Iterable[Torsion], max_power: int = 10_000) -> QuadNum:
    """Least power eta^k of the positive unit with eta^k alpha = alpha mod M for all inputs."""
    eta = frame.eta
    M = frame.module
    alphas = [z.alpha for z in zetas]
    bound = 1
    for a in alphas:
        c0, c1 = M.coords(a)
        bound = math.lcm(bound, c0.denominator, c1.denominator)
    # eta acts on (1/bound)M/M, a finite set, so some power below bound^4 works
    cur = eta
    for _ in range(min(max_power, bound ** 4 + 1)):
        if all(M.contains(cur * a - a) for a in alphas):
            return cur
        cur = cur * eta
    raise DomainError("no fixing unit found within the search bound")
