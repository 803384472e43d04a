"""Brute-force reference computations shared by the tests.

Everything here works by enumerating lattice points of the trace dual of
M = Z*theta^-1 + Z in a box of (l, h) coordinates, nu = l*B0* + h*B1*, and
testing membership with exact field arithmetic.  None of it uses the cone
closed forms of ``hmx.rfun``.
"""
import itertools
import math
import random
from collections import defaultdict
from fractions import Fraction

from hmx.cyclo import CycloCoeff
from hmx.lattice import ZModule
from hmx.qfield import QuadNum
from hmx.rfun import expand
from hmx.semifree import CosetPoint

H_BOX = 60


def dual_point(frame, l, h):
    return frame.dual.from_coordinates(l, h)


def in_minus(nu):
    """nu > 0 and -1 < nu'/nu < 0."""
    c = nu.conj()
    return nu > 0 and c < 0 and c + nu > 0


def in_plus(nu):
    """nu > 0 and 0 < nu'/nu <= 1."""
    c = nu.conj()
    return nu > 0 and c > 0 and c <= nu


def in_quadrant(nu):
    """nu > 0 > nu'."""
    return nu > 0 and nu.conj() < 0


def dual_contains(N, nu):
    """nu in N^*: t(nu * b) integral for both basis vectors of N."""
    return all((nu * b).trace().denominator == 1 for b in N.basis)


def box(lmax, hbox=H_BOX, lmin=-8):
    for l in range(lmin, lmax + 1):
        for h in range(-hbox, hbox + 1):
            yield l, h


def r_oracle(frame, alpha, beta, N, variant, lmax):
    """Coefficients of R_{alpha,beta,N} from its defining relation.

    R(U) = f_{beta^-1 N}(zeta# U) - f_N(zeta U^beta) for variant 'minus' and beta in S+;
    the plus variant swaps f and f+, and beta in S-+ exchanges the two on the right.
    """
    alpha, beta = frame.num(alpha), frame.num(beta)
    left = in_minus if variant == "minus" else in_plus
    if beta.conj() > 0:
        right = left
    else:
        right = in_plus if variant == "minus" else in_minus
    Nb = N.scale(beta.inverse())
    out = defaultdict(lambda: CycloCoeff.rational(0))
    for l, h in box(lmax):
        nu = dual_point(frame, l, h)
        weight = 0
        if dual_contains(Nb, nu) and left(nu):
            weight += 1
        mu = nu / beta
        if dual_contains(N, mu) and right(mu):
            weight -= 1
        if weight:
            assert l >= 1 and abs(h) < H_BOX, "enumeration box too small"
            phase = (nu * alpha / beta).trace()
            out[(l, h)] = out[(l, h)] + CycloCoeff.root_of_unity(phase) * weight
    return {k: v for k, v in out.items() if not v.is_zero()}


def series_coeffs(R, lmax, hmax=None):
    """(l, h) -> CycloCoeff from the power-series expansion of a RationalFn2."""
    raw = expand(R, lmax, hmax)
    grouped = defaultdict(dict)
    for (i, j, k), c in raw.items():
        grouped[(i, j)][k] = grouped[(i, j)].get(k, Fraction(0)) + c
    out = {}
    for key, vec in grouped.items():
        val = CycloCoeff.from_group_ring(vec, R.order)
        if not val.is_zero():
            out[key] = val
    return out


def same_coeffs(a, b):
    keys = set(a) | set(b)
    zero = CycloCoeff.rational(0)
    return all(a.get(k, zero) == b.get(k, zero) for k in keys)


def cone_enumeration(rho1, rho2, lmax, degree, lattice=((1, 0), (0, 1))):
    """Points (l, h) of a sublattice with l > 0, rho1*l < h <= rho2*l and l + h <= degree."""
    (a, b), (_, c) = lattice
    out = {}
    for l in range(1, lmax + 1):
        top = degree - l if rho2 is None else min(degree - l, math.floor(rho2 * l))
        for h in range(math.floor(rho1 * l) + 1, top + 1):
            if l % a == 0 and (h - (l // a) * b) % c == 0:
                out[(l, h)] = CycloCoeff.rational(1)
    return out


def one_dim_configurations(frame, count, seed):
    """Points Phi(alpha) v^r on H = {(t^a, t^b)}: alpha = (k/n)(a B0 + b B1), r in {1, 2}."""
    rng = random.Random(seed)
    b0, b1 = frame.module.basis
    for _ in range(count):
        a, b = rng.choice([(1, 0), (0, 1), (1, 1), (1, 2), (2, 1)])
        n = rng.choice([2, 4])
        size = rng.randint(2, 5)
        yield [CosetPoint((a * b0 + b * b1) * Fraction(rng.randrange(n), n), frame.num(rng.choice([1, 2])))
               for _ in range(size)]


def is_distinct_configuration(frame, points):
    """No two points share both beta and the coset of alpha."""
    M = frame.module
    return all(not (p.beta == q.beta and M.contains(p.alpha - q.alpha))
               for p, q in itertools.combinations(points, 2))


def free_module_configurations(frame, count, seed):
    """Torsion-free points v_k^beta over one or two free generators, beta = core * (1 + sqrt2)^j."""
    rng = random.Random(seed)
    eps = frame.num("1+sqrt(2)")
    cores = [frame.num(x) for x in ("1", "2", "2+sqrt(2)", "4+2*sqrt(2)")]
    for _ in range(count):
        pts = []
        for base in rng.sample(["v1", "v2"], rng.randint(1, 2)):
            for _ in range(rng.randint(2, 3)):
                beta = rng.choice(cores) * eps ** rng.randint(0, 2)
                pts.append(CosetPoint(frame.num(0), beta, base))
        yield pts


def has_unit_related_pair(points):
    """Two points of one class whose exponents differ by a unit of Z[sqrt2]."""
    one = points[0].beta.rational(1)
    ring = ZModule((one, QuadNum(0, 1, 2)))
    for p, q in itertools.combinations(points, 2):
        r = p.beta / q.beta
        if p.base == q.base and ring.contains(r) and abs(r.norm()) == 1:
            return True
    return False
