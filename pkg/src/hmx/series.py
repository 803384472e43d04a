"""High-precision evaluation of the staircase series f_w, the twin series f+,
the module series f_N for N = beta^-1 M, and the Hecke geometric series.

The f-family is summed with a rigorous geometric tail bound.  The Hecke series
are assembled from unit-orbit shells of rational functions; their truncation
is heuristic and every result says so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from .errors import ConvergenceError, DomainError
from .lattice import ZModule
from .qfield import QuadNum, floor_scaled, is_perron
from .rfun import _lattice_coords, r_fn, rf_eval
from .torus import Numeric, ThetaFrame, act, action_matrix, phi_eval

GUARD_BITS = 24


@dataclass(frozen=True)
class EvalConfig:
    prec: int = 96
    max_terms: int = 1_000_000
    tail_margin: int = 8

    def __post_init__(self):
        if self.prec < 32:
            raise DomainError("prec must be at least 32 bits")
        if self.max_terms < 1:
            raise DomainError("max_terms must be positive")

    @property
    def tolerance(self) -> mpmath.mpf:
        return mpmath.ldexp(1, -(self.prec - self.tail_margin))


@dataclass(frozen=True)
class EvalResult:
    """A value with its error metadata."""

    value: mpmath.mpc
    err_bits: int
    rigorous: bool
    terms: int

    def to_json(self) -> dict:
        digits = self.err_bits // 3 + 4
        return {"value": [mpmath.nstr(self.value.real, digits), mpmath.nstr(self.value.imag, digits)],
                "err_bits": self.err_bits, "rigorous": self.rigorous}


DOMAIN_TAGS = ("D", "Dplus", "W_halfplane", "Wplus_halfplane")


def _real(w) -> mpmath.mpf:
    if isinstance(w, QuadNum):
        return w.to_mpf()
    w = Fraction(w)
    return mpmath.mpf(w.numerator) / w.denominator


def in_domain(p, w, tag: str, prec: int = 96) -> bool:
    """Membership in a convergence domain, with a guard band of 2^(-prec/2).

    For 'D' and 'Dplus' the point is a ``Numeric`` (u, v) and ``w`` is the
    slope (for 'Dplus' the Perron number theta).  For the half-plane tags the
    point is a pair (z, z').
    """
    if tag not in DOMAIN_TAGS:
        raise DomainError(f"unknown domain tag {tag!r}")
    with mpmath.workprec(prec + GUARD_BITS):
        eps = mpmath.ldexp(1, -(prec // 2))
        if tag in ("W_halfplane", "Wplus_halfplane"):
            z, zc = (mpmath.mpc(x) for x in p)
            y, yc = z.imag, zc.imag
            if tag == "W_halfplane":
                return y > eps and yc < y - eps
            return y > eps and -y + eps < yc < y - eps
        au, av = abs(mpmath.mpc(p.u)), abs(mpmath.mpc(p.v))
        if not au < 1 - eps:
            return False
        if tag == "D":
            return bool(au * av ** _real(w) < 1 - eps)
        t = (w.inverse()).trace() if isinstance(w, QuadNum) else 1 / Fraction(w) * 2
        return bool(au ** _real(t) * av ** 2 < 1 - eps)


def _floor_fn(w) -> Callable[[int], int]:
    if isinstance(w, QuadNum):
        return lambda l: floor_scaled(l, w)
    w = Fraction(w)
    return lambda l: math.floor(l * w)


def _staircase_sum(p: Numeric, lo: Callable[[int], int], hi: Callable[[int], int],
                   slope_bound, cfg: EvalConfig) -> mpmath.mpc:
    """Sum over l >= 1 of u^l * sum_{lo(l) < h <= hi(l)} v^h.

    ``hi(l) <= slope_bound * l`` bounds the band width and the exponents, which
    gives the majorant sum_{l>L} c*l*q^l with q = |u| max(1,|v|)^c.
    """
    with mpmath.workprec(cfg.prec + GUARD_BITS):
        u, v = mpmath.mpc(p.u), mpmath.mpc(p.v)
        if u == 0:
            return mpmath.mpc(0)
        c = _real(slope_bound)
        q = abs(u) * max(mpmath.mpf(1), abs(v)) ** c
        if not q < 1:
            raise DomainError("point outside the convergence domain")
        target = mpmath.ldexp(1, -(cfg.prec + 4))
        total = mpmath.mpc(0)
        band = mpmath.mpc(0)
        ulp = mpmath.mpc(1)
        lo_m = hi_m = 0
        vlo = vhi = mpmath.mpc(1)  # v^lo_m, v^hi_m
        l = 0
        while True:
            l += 1
            if l > cfg.max_terms:
                raise ConvergenceError(f"no convergence within {cfg.max_terms} terms")
            ulp *= u
            a, b = lo(l), hi(l)
            while hi_m < b:
                vhi *= v
                hi_m += 1
                band += vhi
            while lo_m < a:
                vlo *= v
                lo_m += 1
                band -= vlo
            if b > a:
                total += ulp * band
            tail = c * q ** (l + 1) * ((l + 1) - l * q) / (1 - q) ** 2
            if tail < target:
                return total


def eval_f(w, p: Numeric, cfg: EvalConfig = EvalConfig()) -> mpmath.mpc:
    """f_w(u, v) = sum_{l>=1} sum_{h=1}^{floor(l w)} u^l v^h for w > 0."""
    if not w > 0:
        raise DomainError("the slope w must be positive")
    if not in_domain(p, w, "D", cfg.prec):
        raise DomainError("point outside the domain |u| < 1, |u||v|^w < 1")
    return _staircase_sum(p, lambda l: 0, _floor_fn(w), w, cfg)


def eval_fplus(theta: QuadNum, p: Numeric, cfg: EvalConfig = EvalConfig()) -> mpmath.mpc:
    """f+(u, v): inner sum over floor(theta l) < h <= floor(rho+ l), rho+ = 2/t(theta^-1)."""
    if not is_perron(theta):
        raise DomainError(f"{theta} is not a Perron number of the required shape")
    if not in_domain(p, theta, "Dplus", cfg.prec):
        raise DomainError("point outside the domain |u| < 1, |u|^t(1/theta) |v|^2 < 1")
    rho = 2 / theta.inverse().trace()
    return _staircase_sum(p, _floor_fn(theta), _floor_fn(rho), rho, cfg)


def _frame_of(theta) -> ThetaFrame:
    return theta if isinstance(theta, ThetaFrame) else ThetaFrame(theta)


def eval_f_module(theta, beta, variant: str, p: Numeric,
                  cfg: EvalConfig = EvalConfig()) -> mpmath.mpc:
    """f_{beta^-1 M} (variant 'minus') or f+_{beta^-1 M} ('plus') at p.

    Computed as the series of M at p^beta plus the exact correction R.
    """
    frame = _frame_of(theta)
    beta = frame.num(beta)
    if variant not in ("minus", "plus"):
        raise DomainError("variant must be 'minus' or 'plus'")
    if not beta > 0:
        raise DomainError("beta must be positive")
    q = act(action_matrix(frame, beta), p)
    in_splus = beta.conj() > 0
    use_f = (variant == "minus") == in_splus
    series = eval_f(frame.theta, q, cfg) if use_f else eval_fplus(frame.theta, q, cfg)
    corr = rf_eval(r_fn(frame, 0, beta, frame.module, variant), p, cfg.prec)
    with mpmath.workprec(cfg.prec + GUARD_BITS):
        return series + corr


# ----------------------------------------------------------------------------
# Hecke geometric series


def _hecke_check(kind: str, z, zc):
    y, yc = mpmath.mpc(z).imag, mpmath.mpc(zc).imag
    if kind == "A" and not (y > 0 > yc):
        raise DomainError("A_N needs Im z > 0 > Im z'")
    if kind == "B" and not (y > 0 and yc > 0):
        raise DomainError("B_N needs Im z > 0 and Im z' > 0")
    if kind == "C" and not (y < 0 < yc):
        raise DomainError("C_N needs Im z < 0 < Im z'")
    if kind not in ("A", "B", "C"):
        raise DomainError(f"unknown Hecke series {kind!r}")


def eval_hecke(kind: str, N: Optional[ZModule], z, zc, cfg: EvalConfig = EvalConfig(),
               theta=None, max_shells: int = 200) -> EvalResult:
    """A_N, B_N (or C_N) as the two-sided sum of unit-orbit shells.

    Shell k is R_{eta,N} (R+ for B) evaluated at Phi(eta^k z, eta'^k z').  The
    sum stops in each direction after two consecutive shells below
    2^(-prec-4); this truncation is heuristic.
    """
    frame = _frame_of(theta if theta is not None else QuadNum(-1, 1, 2))
    N = N or frame.module
    _hecke_check(kind, z, zc)
    if kind == "C":
        r = eval_hecke("A", N, mpmath.conj(z), mpmath.conj(zc), cfg, frame, max_shells)
        return EvalResult(mpmath.conj(r.value), r.err_bits, False, r.terms)
    R = r_fn(frame, 0, frame.eta, N, "plus" if kind == "B" else "minus")
    eta = frame.eta
    wp = cfg.prec + GUARD_BITS
    target = mpmath.ldexp(1, -(cfg.prec + 4))
    with mpmath.workprec(wp):
        z, zc = mpmath.mpc(z), mpmath.mpc(zc)
        total = mpmath.mpc(0)
        shells = 0
        for step in (1, -1):
            k = 0 if step == 1 else -1
            small = 0
            while small < 2:
                if shells > max_shells:
                    raise ConvergenceError("Hecke shell sum did not settle")
                e = eta ** k if k >= 0 else eta.inverse() ** (-k)
                pt = phi_eval(frame, e.to_mpf() * z, e.conj().to_mpf() * zc, wp)
                s = rf_eval(R, pt, wp)
                total += s
                shells += 1
                small = small + 1 if abs(s) < target else 0
                k += step
    return EvalResult(total, cfg.prec - cfg.tail_margin, False, shells)


def hecke_lattice_sum(kind: str, N: Optional[ZModule], z, zc, prec: int = 96,
                      theta=None) -> mpmath.mpc:
    """A_N (nu > 0 > nu') or B_N (nu, nu' > 0) by direct enumeration of nu in N*.

    Every nu with exp(-2 pi (nu Im z + nu' Im z')) above 2^-(prec+32) is kept.
    """
    frame = _frame_of(theta if theta is not None else QuadNum(-1, 1, 2))
    N = N or frame.module
    _hecke_check(kind, z, zc)
    if kind == "C":
        return mpmath.conj(hecke_lattice_sum("A", N, mpmath.conj(z), mpmath.conj(zc), prec, frame))
    (a, b), (_, c) = _lattice_coords(frame, N.dual().dual_module())
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        z, zc = mpmath.mpc(z), mpmath.mpc(zc)
        y, yc = z.imag, abs(zc.imag)
        # |term| = exp(-2 pi (nu y + |nu'| yc)) on both sign classes used here
        bound = (wp + 8) * mpmath.log(2) / (2 * mpmath.pi)
        nmax = bound / min(y, yc)
        s0, s1 = frame.dual.dual_basis
        b0, b1 = frame.module.basis
        lmax = int(mpmath.ceil(nmax * (abs(b0.to_mpf()) + abs(b0.conj().to_mpf())))) + 1
        hmax = int(mpmath.ceil(nmax * (abs(b1.to_mpf()) + abs(b1.conj().to_mpf())))) + 1
        f0, f0c, f1, f1c = (float(x) for x in (s0, s0.conj(), s1, s1.conj()))
        fy, fyc, fb = float(y), float(yc), float(bound) * 1.01 + 1e-9

        def sign(fx: float, exact) -> int:
            if abs(fx) > 1e-9:
                return 1 if fx > 0 else -1
            return exact().sign()

        total = mpmath.mpc(0)
        for i in range(-(lmax // a) - 1, lmax // a + 2):
            l = i * a
            for j in range(math.floor((-hmax - i * b) / c) - 1, math.ceil((hmax - i * b) / c) + 2):
                h = i * b + j * c
                if l == 0 and h == 0:
                    continue
                x, xc = l * f0 + h * f1, l * f0c + h * f1c
                # cheap size filter; the exact sign decides membership
                if abs(x) * fy + abs(xc) * fyc > fb:
                    continue
                if sign(x, lambda: s0 * l + s1 * h) <= 0:
                    continue
                sc = sign(xc, lambda: (s0 * l + s1 * h).conj())
                if (kind == "A" and sc >= 0) or (kind == "B" and sc <= 0):
                    continue
                nu = s0 * l + s1 * h
                arg = nu.to_mpf() * z + nu.conj().to_mpf() * zc
                total += mpmath.exp(2j * mpmath.pi * arg)
        return total
