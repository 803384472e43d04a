import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hmx import intmat
from hmx.cyclo import CycloCoeff
from hmx.errors import DomainError, PoleError
from hmx.qfield import qsqrt
from hmx.rfun import (RationalFn2, compose_pow, cone_sum, f_inf, gauss_average_check,
                      r_fn, rf_equal, rf_eval, slopes, theta_fn, twist, twist_by_rotation)
from hmx.torus import Numeric, Torsion, action_matrix, kernel

from oracles import cone_enumeration, r_oracle, same_coeffs, series_coeffs

SQ2 = qsqrt(2)
PREC = 96
INF = math.inf
THETA_CLOSED = RationalFn2({(1, 1, 0): Fraction(1)}, {(1, 0): 1, (1, 1): 1})
TWO_TORSION = [(Fraction(a, 2), Fraction(b, 2)) for a in (0, 1) for b in (0, 1)]


@st.composite
def slope_pairs(draw):
    """rho1, rho2 with denominators at most 7, rho2 >= 0 and -rho2 < rho1 <= rho2."""
    r2 = Fraction(draw(st.integers(0, 21)), draw(st.integers(1, 7)))
    den = draw(st.integers(1, 7))
    lo = math.floor(-r2 * den) + 1
    hi = math.floor(r2 * den)
    assume(lo <= hi)
    return Fraction(draw(st.integers(lo, hi)), den), r2


def truncate(coeffs, degree):
    return {k: v for k, v in coeffs.items() if k[0] + k[1] <= degree}


def numeric_point(u, v):
    with mpmath.workprec(PREC + 24):
        return Numeric(mpmath.mpc(u), mpmath.mpc(v), PREC)


# ---------------------------------------------------------------------------
# cone sums


def test_cone_sum_unit_slope_closed_form():
    assert rf_equal(cone_sum(0, 1), THETA_CLOSED)
    enum = cone_enumeration(Fraction(0), Fraction(1), 12, 12)
    assert same_coeffs(truncate(series_coeffs(cone_sum(0, 1), 12), 12), enum)


def test_cone_sum_two_fifths_boundary():
    coeffs = series_coeffs(cone_sum(0, Fraction(2, 5)), 6)
    assert coeffs[(5, 2)] == 1
    assert (4, 2) not in coeffs


def test_cone_sum_empty_and_invalid():
    assert cone_sum(Fraction(1, 3), Fraction(1, 3)).is_zero()
    with pytest.raises(DomainError):
        cone_sum(-2, 1)
    with pytest.raises(DomainError):
        cone_sum(0, -1)
    with pytest.raises(DomainError):
        cone_sum(0, 1, ((1, 2), (2, 4)))


@given(slope_pairs())
def test_cone_sum_matches_enumeration(pair):
    r1, r2 = pair
    R = cone_sum(r1, r2)
    got = truncate(series_coeffs(R, 16), 16)
    assert same_coeffs(got, cone_enumeration(r1, r2, 16, 16))


@given(slope_pairs(), st.integers(1, 3), st.integers(0, 2), st.integers(1, 3))
def test_cone_sum_on_sublattices(pair, a, b, c):
    r1, r2 = pair
    lattice = ((a, b % c), (0, c))
    R = cone_sum(r1, r2, lattice)
    got = truncate(series_coeffs(R, 16), 16)
    assert same_coeffs(got, cone_enumeration(r1, r2, 16, 16, lattice))


def test_cone_sum_open_cone():
    R = cone_sum(Fraction(1, 2), INF)
    got = series_coeffs(R, 8, 8)
    expected = {(l, h): CycloCoeff.rational(1) for l in range(1, 9) for h in range(1, 9)
                if 2 * h > l}
    assert same_coeffs(got, expected)


# ---------------------------------------------------------------------------
# the f_inf function


def test_f_inf_shape_and_values():
    F = f_inf()
    assert F.num == {(1, 1, 0): 1}
    assert sorted(F.denominator()) == [(0, 1, 1), (1, 0, 1)]
    with mpmath.workprec(PREC + 24):
        val = rf_eval(F, numeric_point(Fraction(1, 2).__float__(), mpmath.mpf(1) / 3))
        assert abs(val - mpmath.mpf(1) / 2) < mpmath.ldexp(1, -PREC)
        assert rf_eval(F, numeric_point(0, "0.7")) == 0


def test_f_inf_is_the_quadrant_series():
    expected = {(l, h): CycloCoeff.rational(1) for l in range(1, 9) for h in range(1, 9)}
    assert same_coeffs(series_coeffs(f_inf(), 8, 8), expected)


def test_f_inf_masser_identity():
    F = f_inf()
    lhs = compose_pow(F, ((2, 0), (0, 2))).scale(4)
    rhs = RationalFn2.zero()
    for rot in TWO_TORSION:
        rhs = rhs + twist_by_rotation(F, rot)
    assert rf_equal(lhs, rhs)
    # and the identity fails once one twist is dropped
    assert not rf_equal(lhs, rhs - F)


def test_pole_detection():
    with pytest.raises(PoleError):
        rf_eval(f_inf(), numeric_point(1, "0.5"))


# ---------------------------------------------------------------------------
# algebra


def sample_functions():
    return [f_inf(), THETA_CLOSED, cone_sum(Fraction(-1, 3), Fraction(2, 5)),
            twist_by_rotation(cone_sum(0, Fraction(3, 7)), (Fraction(1, 3), Fraction(1, 4)))]


def test_arithmetic_agrees_with_evaluation():
    p = numeric_point(mpmath.mpc("0.3", "0.2"), mpmath.mpc("0.45", "-0.1"))
    fns = sample_functions()
    with mpmath.workprec(PREC + 24):
        tol = mpmath.ldexp(1, -PREC + 8)
        for A, B in itertools.product(fns, repeat=2):
            a, b = rf_eval(A, p), rf_eval(B, p)
            assert abs(rf_eval(A + B, p) - (a + b)) < tol
            assert abs(rf_eval(A - B, p) - (a - b)) < tol
            assert abs(rf_eval(A * B, p) - a * b) < tol
        assert abs(rf_eval(fns[0].scale(Fraction(-3, 7)), p) - rf_eval(fns[0], p) * -3 / 7) < tol


def test_rf_equal_is_an_equivalence():
    fns = sample_functions()
    # a second form of each function, over a multiplied-out denominator
    other = [F * RationalFn2({(0, 0, 0): Fraction(1), (2, 1, 0): Fraction(-1)}, {(2, 1): 1})
             for F in fns]
    for F, G in zip(fns, other):
        assert rf_equal(F, F) and rf_equal(F, G) and rf_equal(G, F)
    for F, G in itertools.combinations(fns, 2):
        assert not rf_equal(F, G)


def test_twist_and_compose_identities(frame):
    ident = Torsion(SQ2 * 0, frame.dual)
    for F in sample_functions():
        assert rf_equal(twist(F, ident), F)
        assert rf_equal(compose_pow(F, intmat.IDENTITY), F)


def test_compose_pow_agrees_with_action(frame):
    B = action_matrix(frame, frame.eta)
    p = numeric_point("0.3", "0.5")
    from hmx.torus import act
    with mpmath.workprec(PREC + 24):
        for F in sample_functions():
            lhs = rf_eval(compose_pow(F, B), p)
            assert abs(lhs - rf_eval(F, act(B, p))) < mpmath.ldexp(1, -PREC + 8)


def test_json_round_trip():
    for F in sample_functions():
        G = RationalFn2.from_json(F.to_json())
        assert G.to_json() == F.to_json()
        assert rf_equal(F, G)


# ---------------------------------------------------------------------------
# slopes


def test_slope_examples(frame):
    s = slopes(frame, 3 + 2 * SQ2)
    assert (s.rho, s.rho_plus) == (Fraction(2, 5), Fraction(3, 7))
    assert slopes(frame, 1).rho_plus == 1
    assert slopes(frame, 2 + SQ2).rho == Fraction(1, 3)


def test_slope_ordering_on_sampled_elements(frame):
    rng = random.Random(5)
    theta = frame.theta
    counts = {"plus": 0, "mixed": 0}
    while min(counts.values()) < 30:
        beta = frame.order.element(rng.randint(-20, 20), rng.randint(-20, 20))
        if beta.is_zero() or beta.is_rational():
            continue
        if beta < 0:
            beta = -beta
        if abs(beta.conj()) >= beta:
            continue  # only beta > |beta'| has ordered slopes
        s = slopes(frame, beta)
        if beta.conj() > 0 and counts["plus"] < 30:
            assert s.rho_plus > theta > s.rho > 0
            counts["plus"] += 1
        elif beta.conj() < 0 and counts["mixed"] < 30:
            assert s.rho > theta > s.rho_plus > 0
            counts["mixed"] += 1


# ---------------------------------------------------------------------------
# R functions


def test_r_eta_is_the_staircase_cone(frame):
    R = r_fn(frame, 0, frame.eta, frame.module, "minus")
    assert rf_equal(R, cone_sum(0, Fraction(2, 5)))
    Rp = r_fn(frame, 0, frame.eta, frame.module, "plus")
    assert rf_equal(Rp, cone_sum(Fraction(3, 7), 1))


def test_r_vanishes_for_rational_beta(frame):
    for m in (1, 2, 5):
        for variant in ("minus", "plus"):
            assert r_fn(frame, SQ2 / 2, m, frame.module, variant).is_zero()
            assert r_fn(frame, 0, m, frame.module.scale(2 + SQ2), variant).is_zero()


def test_r_with_torsion_is_a_twist(frame):
    alpha, beta = SQ2 / 2, 2 + SQ2
    R = r_fn(frame, alpha, beta, frame.module, "minus")
    base = r_fn(frame, 0, beta, frame.module, "minus")
    assert rf_equal(R, twist(base, Torsion(alpha / beta, frame.dual)))
    assert R.order == 2


def test_r_rejects_non_positive_beta(frame):
    with pytest.raises(DomainError):
        r_fn(frame, 0, -frame.eta)
    with pytest.raises(DomainError):
        r_fn(frame, 0, SQ2 / 3)


R_CASES = [
    (alpha, beta, variant)
    for beta in ("3+2*sqrt(2)", "2+sqrt(2)", "1+sqrt(2)", "3+sqrt(2)", "5+3*sqrt(2)", "-1+2*sqrt(2)", "2*sqrt(2)")
    for alpha in ("0", "sqrt(2)/2", "(1+sqrt(2))/3")
    for variant in ("minus", "plus")
]


@pytest.mark.parametrize("alpha,beta,variant", R_CASES)
def test_r_matches_defining_relation(frame, alpha, beta, variant):
    R = r_fn(frame, frame.num(alpha), frame.num(beta), frame.module, variant)
    assert same_coeffs(series_coeffs(R, 10), r_oracle(frame, alpha, beta, frame.module, variant, 10))


@pytest.mark.parametrize("beta", ["3+2*sqrt(2)", "1+sqrt(2)"])
def test_r_on_a_sub_dual_module(frame, beta):
    N = frame.module.scale((2 + SQ2).inverse())
    for variant in ("minus", "plus"):
        R = r_fn(frame, SQ2 / 4, frame.num(beta), N, variant)
        assert same_coeffs(series_coeffs(R, 10), r_oracle(frame, SQ2 / 4, beta, N, variant, 10))


@pytest.mark.parametrize("k", [2, 3])
def test_telescoping(frame, k):
    R = r_fn(frame, 0, frame.eta, frame.module, "minus")
    B = action_matrix(frame, frame.eta)
    total = RationalFn2.zero()
    for j in range(k):
        total = total + compose_pow(R, B ** j)
    assert rf_equal(r_fn(frame, 0, frame.eta ** k, frame.module, "minus"), total)


@pytest.mark.parametrize("beta", ["3+2*sqrt(2)", "2+sqrt(2)", "1+sqrt(2)", "5+3*sqrt(2)"])
def test_support_discipline(frame, beta):
    """Minus-variant monomials sit in nu > 0 > nu', plus-variant in nu, nu' > 0."""
    for variant, ok in (("minus", lambda nu: nu > 0 > nu.conj()),
                        ("plus", lambda nu: nu > 0 and nu.conj() > 0)):
        R = r_fn(frame, 0, frame.num(beta), frame.module, variant)
        coeffs = series_coeffs(R, 16)
        assert coeffs
        for (l, h) in truncate(coeffs, 16):
            assert ok(frame.dual.from_coordinates(l, h))


# ---------------------------------------------------------------------------
# theta functions and Gauss averaging


def test_theta_of_module(frame):
    T = theta_fn(frame)
    assert rf_equal(T, THETA_CLOSED)
    assert rf_equal(T, cone_sum(0, Fraction(2) / frame.theta.inverse().trace()))
    coeffs = series_coeffs(T, 4)
    assert coeffs[(3, 3)] == 1 and (3, 4) not in coeffs


def test_theta_of_sub_dual_is_kernel_average(frame):
    beta = 2 + SQ2
    avg = RationalFn2.zero()
    for z in kernel(frame, beta):
        avg = avg + twist(theta_fn(frame), z)
    assert rf_equal(theta_fn(frame, frame.module.scale(beta.inverse())), avg.scale(Fraction(1, 2)))


@pytest.mark.parametrize("beta", ["2+sqrt(2)", "1", "2"])
def test_gauss_average(frame, beta):
    assert gauss_average_check(frame, frame.num(beta), frame.eta)


def test_gauss_average_detects_wrong_scaling(frame):
    beta = 2 + SQ2
    base = r_fn(frame, 0, frame.eta, frame.module, "minus")
    lhs = RationalFn2.zero()
    for z in kernel(frame, beta):
        lhs = lhs + twist(base, z)
    rhs = r_fn(frame, 0, frame.eta, frame.module.scale(beta.inverse()), "minus")
    assert not rf_equal(lhs, rhs)
    assert rf_equal(lhs, rhs.scale(2))
