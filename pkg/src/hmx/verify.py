"""Identity suites run by ``hmx verify``.

Each suite returns a list of checks ``{"name", "pass", ...}``.  All sampling
goes through one seeded ``random.Random``.
"""
from __future__ import annotations

import random
from typing import Callable, Dict, List

import mpmath

from .lattice import index
from .qfield import parse_quad
from .rfun import gauss_average_check, r_fn, rf_eval, theta_fn
from .semifree import (CosetPoint, SemiFreeTuple, certificate, decide, gauss_sum_check,
                       numeric_crosscheck, vandermonde_nonsingular)
from .series import (GUARD_BITS, EvalConfig, eval_f, eval_fplus, eval_hecke,
                     hecke_lattice_sum, in_domain)
from .torus import Numeric, ThetaFrame, act, action_matrix

DEFAULT_THETA = "sqrt(2)-1"
MASSER_SLOPES = ("sqrt(2)-1", "(sqrt(5)-1)/2", "sqrt(3)-1")


def sample_point(rng: random.Random, w, tag: str, prec: int) -> Numeric:
    """Random point strictly inside domain D (slope w) or D+ (Perron number w)."""
    while True:
        ru = rng.uniform(0.05, 0.6)
        rv = rng.uniform(0.1, 1.4)
        with mpmath.workprec(prec + GUARD_BITS):
            u = mpmath.mpf(ru) * mpmath.expjpi(2 * mpmath.mpf(rng.random()))
            v = mpmath.mpf(rv) * mpmath.expjpi(2 * mpmath.mpf(rng.random()))
            p = Numeric(u, v, prec)
        # keep a margin from the boundary so that tails stay short
        with mpmath.workprec(prec + GUARD_BITS):
            q = Numeric(u * mpmath.mpf("1.25"), v, prec)
        if in_domain(p, w, tag, prec) and in_domain(q, w, tag, prec):
            return p


def _check(name: str, residual, tol, **extra) -> dict:
    out = {"name": name, "residual": mpmath.nstr(residual, 6), "pass": bool(residual < tol)}
    out.update(extra)
    return out


def suite_masser(rng: random.Random, prec: int, trials: int) -> List[dict]:
    """4 f(u^2, v^2) = f(u,v) + f(-u,v) + f(u,-v) + f(-u,-v) for quadratic slopes."""
    cfg = EvalConfig(prec)
    checks = []
    for lit in MASSER_SLOPES:
        w = parse_quad(lit)
        for k in range(trials):
            p = sample_point(rng, w, "D", prec)
            with mpmath.workprec(prec + GUARD_BITS):
                u, v = p.u, p.v
                f = lambda a, b: eval_f(w, Numeric(a, b, prec), cfg)
                res = abs(4 * f(u * u, v * v) - f(u, v) - f(-u, v) - f(u, -v) - f(-u, -v))
            checks.append(_check(f"masser w={lit} #{k}", res, cfg.tolerance))
    return checks


def suite_feq(rng: random.Random, prec: int, trials: int, theta_lit: str = DEFAULT_THETA) -> List[dict]:
    """f(u^eta) = f(u) - R_eta(u), the same for f+ and R+_eta, and Theta = f + f+."""
    cfg = EvalConfig(prec)
    frame = ThetaFrame(parse_quad(theta_lit))
    th = frame.theta
    B = action_matrix(frame, frame.eta)
    R = r_fn(frame, 0, frame.eta)
    Rp = r_fn(frame, 0, frame.eta, variant="plus")
    T = theta_fn(frame)
    checks = []
    for k in range(trials):
        p = sample_point(rng, th, "D", prec)
        with mpmath.workprec(prec + GUARD_BITS):
            res = abs(eval_f(th, act(B, p), cfg) - eval_f(th, p, cfg) + rf_eval(R, p))
        checks.append(_check(f"functional equation #{k}", res, cfg.tolerance))
    for k in range(trials):
        p = sample_point(rng, th, "Dplus", prec)
        with mpmath.workprec(prec + GUARD_BITS):
            res = abs(eval_fplus(th, act(B, p), cfg) - eval_fplus(th, p, cfg) + rf_eval(Rp, p))
            res2 = abs(rf_eval(T, p) - eval_f(th, p, cfg) - eval_fplus(th, p, cfg))
        checks.append(_check(f"twin functional equation #{k}", res, cfg.tolerance))
        checks.append(_check(f"theta splitting #{k}", res2, cfg.tolerance))
    return checks


def witnessed_tuples(frame: ThetaFrame) -> Dict[str, List[CosetPoint]]:
    """The three standard dependent tuples over M = Z theta^-1 + Z."""
    M = frame.module
    b0, b1 = M.basis
    zero = frame.num(0)
    half = [zero, b0 / 2, b1 / 2, (b0 + b1) / 2]
    return {
        "unit pair": [CosetPoint(zero, frame.eta), CosetPoint(zero, frame.num(1))],
        "kernel triple": [CosetPoint(zero, frame.num("2+sqrt(2)")), CosetPoint(zero, frame.num(1)),
                          CosetPoint(frame.num("sqrt(2)/2"), frame.num(1))],
        "two-torsion quintuple": [CosetPoint(a, frame.num(1)) for a in half]
        + [CosetPoint(zero, frame.num(2))],
    }


EXPECTED_WITNESSES = {"unit pair": [1, -1], "kernel triple": [2, -1, -1],
                      "two-torsion quintuple": [-1, -1, -1, -1, 4]}


def suite_kernel(rng: random.Random, prec: int, trials: int) -> List[dict]:
    """Gauss averaging over isogeny kernels, witnesses and certificates."""
    frame = ThetaFrame(parse_quad(DEFAULT_THETA))
    cfg = EvalConfig(prec)
    checks = [
        {"name": "gauss average beta=2+sqrt(2)",
         "pass": gauss_average_check(frame, frame.num("2+sqrt(2)"), frame.eta)},
        {"name": "gauss average beta=2", "pass": gauss_average_check(frame, frame.num(2), frame.eta)},
    ]
    for name, pts in witnessed_tuples(frame).items():
        v = sample_point(rng, frame.theta, "D", prec)
        t = SemiFreeTuple(frame, pts, {"v1": v})
        verdict = decide(t)
        c = verdict.classes[0]
        ok = (not verdict.semifree) and c.witness == EXPECTED_WITNESSES[name]
        checks.append({"name": f"witness {name}", "pass": ok, "witness": c.witness, "L": c.L})
        if c.witness is None:
            continue
        lam = certificate(t, c.witness, c.indices)
        rep = numeric_crosscheck(t, c.witness, c.indices, lam, cfg)
        checks.append({"name": f"certificate {name}", "pass": rep["pass"], "residual": rep["residual"]})
    return checks


def suite_hecke(rng: random.Random, prec: int, trials: int) -> List[dict]:
    """Unit-orbit shell sums against direct lattice sums for A_M and B_M."""
    frame = ThetaFrame(parse_quad(DEFAULT_THETA))
    cfg = EvalConfig(prec)
    checks = []
    tol = mpmath.ldexp(1, -(prec // 2))
    for k in range(trials):
        x, x2 = rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)
        y, y2 = rng.uniform(0.2, 0.4), rng.uniform(0.2, 0.4)
        for kind, sign in (("A", -1), ("B", 1)):
            with mpmath.workprec(prec + GUARD_BITS):
                z, zc = mpmath.mpc(x, y), mpmath.mpc(x2, sign * y2)
                shell = eval_hecke(kind, frame.module, z, zc, cfg, frame)
                direct = hecke_lattice_sum(kind, frame.module, z, zc, prec, frame)
                res = abs(shell.value - direct)
            checks.append(_check(f"hecke {kind} #{k}", res, tol, rigorous=shell.rigorous,
                                 shells=shell.terms))
    return checks


def module_pairs(frame: ThetaFrame):
    """Five pairs M1 containing M2, all built from M."""
    M = frame.module
    q = frame.num
    return [
        (M.scale(q("1/2")), M),
        (M.scale(q("2+sqrt(2)").inverse()), M),
        (M, M.scale(q(3))),
        (M.scale(q("3+sqrt(2)").inverse()), M),
        (M.scale(q("1/2")), M.scale(q("2+sqrt(2)"))),
    ]


def suite_gauss(rng: random.Random, prec: int, trials: int) -> List[dict]:
    """Character sums over M1/M2 are 0 or [M1:M2]."""
    frame = ThetaFrame(parse_quad(DEFAULT_THETA))
    checks = []
    for j, (M1, M2) in enumerate(module_pairs(frame)):
        dual2 = M2.dual().dual_module()
        ok = True
        for _ in range(max(trials, 4)):
            nu = dual2.element(rng.randint(-6, 6), rng.randint(-6, 6))
            ok = ok and gauss_sum_check(M1, M2, nu)
        checks.append({"name": f"gauss sum pair {j}", "pass": ok, "index": str(index(M1, M2))})
    return checks


def suite_vandermonde(rng: random.Random, prec: int, trials: int) -> List[dict]:
    frame = ThetaFrame(parse_quad(DEFAULT_THETA))
    return [{"name": f"character matrix L={L}", "pass": vandermonde_nonsingular(frame, L)}
            for L in (2, 3, 4, 6)]


SUITES: Dict[str, Callable[[random.Random, int, int], List[dict]]] = {
    "masser": suite_masser,
    "feq": suite_feq,
    "kernel": suite_kernel,
    "hecke": suite_hecke,
    "gauss": suite_gauss,
    "vandermonde": suite_vandermonde,
}


def run_suites(names: List[str], prec: int, trials: int, seed: int) -> Dict[str, List[dict]]:
    rng = random.Random(seed)
    return {name: SUITES[name](rng, prec, trials) for name in names}
