"""Exact decision procedure for semi-freeness of coset points, relation
witnesses, and the rational function realising the relation among values.

A point is u = Phi(alpha) * v^beta for a declared base v.  Points sharing a
base form a class.  Inside a class the formal support series are linearly
dependent exactly when the characteristic functions

    chi_i(mu) = [beta_i mu + alpha_i in M],   mu in L^-1 M / M,

are, and a kernel vector b gives the series relation c_i = |n(beta_i)| b_i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from .cyclo import CycloCoeff
from .errors import CertificateError, DomainError, InputError, NotInOrder, SizeError
from .lattice import ZModule, coset_reps, index
from .qfield import QuadNum
from .rfun import RationalFn2, compose_pow, r_fn, rf_eval, theta_fn, twist
from .series import EvalConfig, GUARD_BITS, eval_f, in_domain
from .torus import Numeric, ThetaFrame, Torsion, act, action_matrix, fixing_unit

MAX_L = 1 << 20


@dataclass(frozen=True)
class CosetPoint:
    alpha: QuadNum
    beta: QuadNum
    base: str = "v1"


class SemiFreeTuple:
    """Coset points over a theta frame, with optional numeric base values.

    Each class must have all beta of one sign; a class with negative betas is
    re-expressed over the inverse base (v -> v^-1, beta -> -beta).
    """

    def __init__(self, frame: ThetaFrame, points: Sequence[CosetPoint],
                 bases: Optional[Dict[str, Numeric]] = None):
        self.frame = frame
        M = frame.module
        self.bases = dict(bases or {})
        self.inverted: Dict[str, bool] = {}
        pts = []
        for p in points:
            alpha, beta = frame.num(p.alpha), frame.num(p.beta)
            if beta.is_zero():
                raise InputError("beta must be non-zero")
            try:
                action_matrix(frame, beta)
            except NotInOrder as exc:
                raise InputError(str(exc)) from exc
            neg = beta.sign() < 0
            if self.inverted.setdefault(p.base, neg) != neg:
                raise InputError(f"class {p.base!r} mixes betas of both signs")
            pts.append((alpha, beta, p.base))
        self.points: List[CosetPoint] = []
        for alpha, beta, base in pts:
            if self.inverted[base]:
                beta = -beta
            self.points.append(CosetPoint(M.reduce(alpha), beta, base))
        for base, inv in self.inverted.items():
            if inv and base in self.bases:
                b = self.bases[base]
                with mpmath.workprec(b.prec + 16):
                    self.bases[base] = Numeric(1 / b.u, 1 / b.v, b.prec)

    def classes(self) -> List[Tuple[str, List[int]]]:
        out: Dict[str, List[int]] = {}
        for i, p in enumerate(self.points):
            out.setdefault(p.base, []).append(i)
        return list(out.items())

    # JSON
    @classmethod
    def from_json(cls, obj, prec: int = 96) -> "SemiFreeTuple":
        try:
            theta = QuadNum.from_json(obj["theta"])
            frame = ThetaFrame(theta)
            points = [CosetPoint(QuadNum.from_json(p.get("alpha", 0), theta.d),
                                 QuadNum.from_json(p["beta"], theta.d), p.get("base", "v1"))
                      for p in obj["points"]]
            bases = {}
            for name, b in (obj.get("bases") or {}).items():
                with mpmath.workprec(prec + 16):
                    bases[name] = Numeric(_cx(b["u"]), _cx(b["v"]), prec)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad semi-freeness input: {exc}") from exc
        if not points:
            raise InputError("no points given")
        return cls(frame, points, bases)


def _cx(x):
    if isinstance(x, (list, tuple)):
        return mpmath.mpc(*[mpmath.mpf(str(t)) for t in x])
    return mpmath.mpc(mpmath.mpf(str(x)))


# ----------------------------------------------------------------------------
# the characteristic-function matrix


def torsion_order(frame: ThetaFrame, alpha: QuadNum) -> int:
    """Least l > 0 with l*alpha in M."""
    c0, c1 = frame.module.coords(alpha)
    return math.lcm(c0.denominator, c1.denominator)


def choose_L(frame: ThetaFrame, points: Sequence[CosetPoint], mode: str = "lcm",
             n_prime: Optional[int] = None) -> int:
    """Level L with every chi_i supported on L^-1 M / M.

    ``mode='product'`` gives N' * prod g_i l_i with N' = m + 1 by default.
    ``mode='lcm'`` gives lcm(g_i l_i), the smallest level of this shape that
    contains all supports.
    """
    if not points:
        raise DomainError("choose_L needs a non-empty class")
    factors = [abs(frame.num(p.beta).norm().numerator) * torsion_order(frame, frame.num(p.alpha))
               for p in points]
    if mode == "product":
        out = n_prime if n_prime is not None else len(points) + 1
        if out <= len(points):
            raise DomainError("N' must exceed the number of points")
        for f in factors:
            out *= f
        return out
    if mode == "lcm":
        return math.lcm(*factors)
    raise InputError(f"unknown L mode {mode!r}")


def level_cosets(frame: ThetaFrame, L: int) -> List[QuadNum]:
    """Canonical representatives of L^-1 M / M."""
    if L * L > MAX_L:
        raise SizeError(f"L = {L} gives more than {MAX_L} cosets")
    M = frame.module
    return coset_reps(M.scale(QuadNum(Fraction(1, L), 0, M.d)), M)


def _coord_matrix(frame: ThetaFrame, beta: QuadNum) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """Integer matrix of x -> beta*x in the basis of M (columns are images)."""
    M = frame.module
    cols = [M.coords(beta * b) for b in M.basis]
    if any(c.denominator != 1 for col in cols for c in col):
        raise InputError(f"{beta} is not in the stabiliser order")
    return ((int(cols[0][0]), int(cols[1][0])), (int(cols[0][1]), int(cols[1][1])))


def char_vector(frame: ThetaFrame, point: CosetPoint, L: int) -> List[int]:
    """chi(mu) = [beta mu + alpha in M] over mu in L^-1 M / M.

    Cosets are mu = (x0 B0 + x1 B1)/L with 0 <= x0, x1 < L, x0 major.  The
    support always has |n(beta)| elements once L is a valid level.
    """
    if L * L > MAX_L:
        raise SizeError(f"L = {L} gives more than {MAX_L} cosets")
    alpha, beta = frame.num(point.alpha), frame.num(point.beta)
    (m00, m01), (m10, m11) = _coord_matrix(frame, beta)
    a0, a1 = (c * L for c in frame.module.coords(alpha))
    if a0.denominator != 1 or a1.denominator != 1:
        raise DomainError(f"level {L} does not contain the support of {point}")
    a0, a1 = int(a0), int(a1)
    vec = [int((m00 * x0 + m01 * x1 + a0) % L == 0 and (m10 * x0 + m11 * x1 + a1) % L == 0)
           for x0 in range(L) for x1 in range(L)]
    if sum(vec) != abs(beta.norm()):
        raise DomainError(f"level {L} does not contain the support of {point}")
    return vec


def relation_matrix(frame: ThetaFrame, points: Sequence[CosetPoint], L: int):
    """The nu-indexed matrix with entry e(t(alpha_i nu / beta_i)) when nu is in
    beta_i M*, else 0, for nu in M*/L M*.  Returns (row representatives, rows)."""
    Mstar = frame.dual.dual_module()
    reps = coset_reps(Mstar, Mstar.scale(QuadNum(L, 0, frame.d)))
    rows = []
    for nu in reps:
        row = []
        for p in points:
            alpha, beta = frame.num(p.alpha), frame.num(p.beta)
            Nstar = Mstar.scale(beta)
            if Nstar.contains(nu):
                row.append(CycloCoeff.root_of_unity((alpha * nu / beta).trace()))
            else:
                row.append(CycloCoeff.rational(0))
        rows.append(row)
    return reps, rows


# ----------------------------------------------------------------------------
# exact linear algebra


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return 0
    n, m = len(a), len(a[0])
    rank, prev = 0, 1
    for c in range(m):
        piv = next((r for r in range(rank, n) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, n):
            a[r] = [(a[rank][c] * a[r][j] - a[r][c] * a[rank][j]) // prev for j in range(m)]
        prev = a[rank][c]
        rank += 1
        if rank == n:
            break
    return rank


def rational_kernel(rows: Sequence[Sequence[int]], ncols: int) -> List[List[Fraction]]:
    """Basis of {x : rows . x = 0} over Q from the reduced row echelon form."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -a[i][fc]
        basis.append(x)
    return basis


def primitive(vec: Sequence[Fraction]) -> List[int]:
    """Integer multiple with gcd 1; the entry of largest size (first on ties) is positive."""
    den = math.lcm(*[Fraction(x).denominator for x in vec])
    ints = [int(Fraction(x) * den) for x in vec]
    g = math.gcd(*ints)
    if g == 0:
        raise DomainError("zero vector has no primitive form")
    ints = [x // g for x in ints]
    lead = max(range(len(ints)), key=lambda i: (abs(ints[i]), -i))
    if ints[lead] < 0:
        ints = [-x for x in ints]
    return ints


# ----------------------------------------------------------------------------
# decision


@dataclass
class ClassVerdict:
    base: str
    indices: List[int]
    L: int
    rank: int
    witness: Optional[List[int]] = None
    kernel_dim: int = 0

    @property
    def independent(self) -> bool:
        return self.witness is None


@dataclass
class Verdict:
    semifree: bool
    classes: List[ClassVerdict]
    cert: Optional[RationalFn2] = None
    L_used: int = 0
    crosscheck: Optional[dict] = None

    def to_json(self) -> dict:
        return {"semifree": self.semifree,
                "classes": [{"base": c.base, "witness": c.witness, "L": c.L} for c in self.classes],
                "certificate": self.cert.to_json() if self.cert is not None else None,
                "crosscheck": self.crosscheck}


def decide_class(frame: ThetaFrame, points: Sequence[CosetPoint], mode: str = "lcm",
                 n_prime: Optional[int] = None) -> Tuple[int, int, Optional[List[int]], int]:
    """(L, rank, witness or None, kernel dimension) for one class."""
    L = choose_L(frame, points, mode, n_prime)
    chis = [char_vector(frame, p, L) for p in points]
    m = len(points)
    # rank and kernel only see the distinct columns (at most 2^m of them)
    columns = sorted({tuple(chis[i][j] for i in range(m)) for j in range(L * L)})
    rank = bareiss_rank([[col[i] for col in columns] for i in range(m)])
    # b with sum b_i chi_i = 0 is the kernel of the transposed matrix
    kern = rational_kernel(columns, m)
    if len(kern) != m - rank:
        raise AssertionError("rank and kernel dimension disagree")
    if not kern:
        return L, rank, None, 0
    b = kern[0]
    c = [abs(frame.num(p.beta).norm()) * x for p, x in zip(points, b)]
    wit = primitive(c)
    # re-verify: the rescaled vector must kill every chi column
    back = [Fraction(w, int(abs(frame.num(p.beta).norm()))) for p, w in zip(points, wit)]
    if any(sum(back[i] * col[i] for i in range(m)) for col in columns):
        raise AssertionError("witness does not satisfy the characteristic system")
    return L, rank, wit, len(kern)


def decide(t: SemiFreeTuple, mode: str = "lcm", n_prime: Optional[int] = None) -> Verdict:
    """Semi-free iff every class has linearly independent characteristic functions."""
    out = []
    for base, idx in t.classes():
        pts = [t.points[i] for i in idx]
        L, rank, wit, kd = decide_class(t.frame, pts, mode, n_prime)
        out.append(ClassVerdict(base, idx, L, rank, wit, kd))
    return Verdict(all(c.independent for c in out), out, None, max(c.L for c in out))


def relation_coefficients(t: SemiFreeTuple, witness: Sequence[int], indices: Sequence[int]) -> List[int]:
    """Coefficients d_i of the value relation sum d_i f(u_i) = Lambda(v).

    The series relation holds with c_i; points with beta' < 0 enter through
    f = Theta - f+, which flips their sign.
    """
    return [c if t.points[i].beta.conj() > 0 else -c for c, i in zip(witness, indices)]


def shell_check(t: SemiFreeTuple, witness: Sequence[int], indices: Sequence[int]) -> bool:
    """sum c_i R_{eta, N_i}(zeta_i# u) = 0 and the same for R+, with N_i = beta_i^-1 M."""
    frame = t.frame
    M = frame.module
    sharps = [Torsion(t.points[i].alpha / t.points[i].beta, frame.dual) for i in indices]
    eta = fixing_unit(frame, sharps)
    for variant in ("minus", "plus"):
        total = RationalFn2.zero()
        for c, i, z in zip(witness, indices, sharps):
            Ni = M.scale(t.points[i].beta.inverse())
            total = total + twist(r_fn(frame, 0, eta, Ni, variant), z).scale(c)
        if not total.is_zero():
            return False
    return True


def certificate(t: SemiFreeTuple, witness: Sequence[int], indices: Sequence[int],
                verify: bool = True) -> RationalFn2:
    """Lambda with sum d_i f(u_i) = Lambda(v), d = relation_coefficients(...)."""
    frame = t.frame
    if verify and not shell_check(t, witness, indices):
        raise CertificateError("shell identity fails: the vector is not a valid witness")
    lam = RationalFn2.zero()
    theta_m = theta_fn(frame)
    for c, i in zip(witness, indices):
        p = t.points[i]
        lam = lam - r_fn(frame, p.alpha, p.beta, frame.module, "minus").scale(c)
        if p.beta.conj() < 0:
            zeta = Torsion(p.alpha, frame.dual)
            th = compose_pow(twist(theta_m, zeta), action_matrix(frame, p.beta))
            lam = lam - th.scale(c)
    return lam


def point_value(t: SemiFreeTuple, i: int, prec: int) -> Numeric:
    """Numeric u_i = Phi(alpha_i) * v^beta_i."""
    p = t.points[i]
    if p.base not in t.bases:
        raise DomainError(f"no numeric value for base {p.base!r}")
    v = t.bases[p.base]
    w = act(action_matrix(t.frame, p.beta), v)
    z = Torsion(p.alpha, t.frame.dual).to_numeric(prec + GUARD_BITS)
    with mpmath.workprec(prec + GUARD_BITS):
        return Numeric(z.u * w.u, z.v * w.v, prec)


def numeric_crosscheck(t: SemiFreeTuple, witness: Sequence[int], indices: Sequence[int],
                       lam: RationalFn2, cfg: EvalConfig = EvalConfig()) -> dict:
    """|sum d_i f(u_i) - Lambda(v)| against 2^-(prec-8)."""
    d = relation_coefficients(t, witness, indices)
    base = t.points[indices[0]].base
    if base not in t.bases:
        raise DomainError(f"no numeric value for base {base!r}")
    v = t.bases[base]
    with mpmath.workprec(cfg.prec + GUARD_BITS):
        total = mpmath.mpc(0)
        for c, i in zip(d, indices):
            u = point_value(t, i, cfg.prec)
            if not in_domain(u, t.frame.theta, "D", cfg.prec):
                raise DomainError(f"point {i} lies outside the convergence domain")
            total += c * eval_f(t.frame.theta, u, cfg)
        err = abs(total - rf_eval(lam, v, cfg.prec))
        tol = cfg.tolerance
        return {"base": base, "coefficients": d, "residual": mpmath.nstr(err, 8),
                "tolerance_bits": cfg.prec - cfg.tail_margin, "pass": bool(err < tol)}


def run(t: SemiFreeTuple, certify: bool = False, crosscheck: bool = False,
        cfg: EvalConfig = EvalConfig(), mode: str = "lcm") -> Verdict:
    """decide, then build and check certificates for dependent classes."""
    v = decide(t, mode)
    reports = []
    for c in v.classes:
        if c.witness is None or not (certify or crosscheck):
            continue
        lam = certificate(t, c.witness, c.indices)
        if v.cert is None:
            v.cert = lam
        if crosscheck:
            reports.append(numeric_crosscheck(t, c.witness, c.indices, lam, cfg))
    if crosscheck:
        v.crosscheck = {"classes": reports, "pass": all(r["pass"] for r in reports)}
    return v


# ----------------------------------------------------------------------------
# lemmas behind the reduction


def gauss_sum(M1: ZModule, M2: ZModule, nu: QuadNum) -> CycloCoeff:
    """sum over mu in M1/M2 of e(t(mu nu)), for nu in the dual of M2."""
    M2star = M2.dual().dual_module()
    if not M2star.contains(nu):
        raise DomainError("nu must lie in the dual of the smaller module")
    total = CycloCoeff.rational(0)
    for mu in coset_reps(M1, M2):
        total = total + CycloCoeff.root_of_unity((mu * nu).trace())
    return total


def gauss_sum_check(M1: ZModule, M2: ZModule, nu: QuadNum) -> bool:
    """The sum is [M1:M2] when nu is in M1*, and 0 otherwise."""
    s = gauss_sum(M1, M2, nu)
    expected = index(M1, M2) if M1.dual().dual_module().contains(nu) else 0
    return s == Fraction(expected)


def vandermonde_matrix(frame: ThetaFrame, L: int) -> List[List[CycloCoeff]]:
    """(e(t(mu nu))) with rows nu in L^-1 M / M and columns mu in M*/L M*."""
    Mstar = frame.dual.dual_module()
    mus = coset_reps(Mstar, Mstar.scale(QuadNum(L, 0, frame.d)))
    nus = level_cosets(frame, L)
    return [[CycloCoeff.root_of_unity((mu * nu).trace()).lift(L) for mu in mus] for nu in nus]


def cyclo_det(mat: List[List[CycloCoeff]]) -> CycloCoeff:
    """Exact determinant over Q(zeta_n) by Gaussian elimination."""
    a = [list(r) for r in mat]
    n = len(a)
    det = CycloCoeff.rational(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not a[r][c].is_zero()), None)
        if piv is None:
            return CycloCoeff.rational(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        pv = a[c][c]
        det = det * pv
        inv = pv.inverse()
        for r in range(c + 1, n):
            if not a[r][c].is_zero():
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def vandermonde_nonsingular(frame: ThetaFrame, L: int) -> bool:
    return not cyclo_det(vandermonde_matrix(frame, L)).is_zero()
