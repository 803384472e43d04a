"""Command-line interface: ``hmx field|rfun|eval|verify|semifree``.

Reports are JSON on stdout.  Exit status is 0 when every check passes, 1 on
a verification failure and 2 on input or usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional

import mpmath

from .errors import HmxError
from .intmat import det
from .qfield import cf_expand, is_perron, parse_quad, reduce_w
from .rfun import cone_sum, f_inf, r_fn, slopes, theta_fn
from .semifree import SemiFreeTuple, run
from .series import GUARD_BITS, EvalConfig, EvalResult, eval_f, eval_fplus
from .torus import Numeric, ThetaFrame, action_matrix, is_good
from .verify import SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_prec() -> int:
    raw = os.environ.get("HMX_PREC", "96")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HMX_PREC must be an integer, got {raw!r}")


def _mat(m):
    return [list(r) for r in m]


def _frac(x: Fraction) -> str:
    return str(x)


def cmd_field(args) -> dict:
    if (args.theta is None) == (args.w is None):
        raise UsageError("give exactly one of --theta and --w")
    out = {}
    if args.w is not None:
        w = parse_quad(args.w)
        red = reduce_w(w)
        theta = red.theta
        out["w"] = w.to_literal()
        out["reduction"] = {"D": _mat(red.matD), "T": _mat(red.matT), "det_D": det(red.matD)}
    else:
        theta = parse_quad(args.theta)
        if theta.is_rational():
            raise UsageError("theta must be irrational")
    if not is_perron(theta):
        raise UsageError(f"{theta.to_literal()} does not satisfy 0 < theta < 1 and theta' < -1")
    frame = ThetaFrame(theta)
    cf = cf_expand(theta)
    B = action_matrix(frame, frame.eta)
    out.update({
        "theta": theta.to_literal(),
        "perron": True,
        "continued_fraction_of_inverse": {"preperiod": cf.preperiod, "period": cf.period},
        "module_basis": [b.to_literal() for b in frame.module.basis],
        "order_basis": [b.to_literal() for b in frame.order.basis],
        "disc_sqrt": frame.delta.to_literal(),
        "eta": frame.eta.to_literal(),
        "B_eta": _mat(B.m),
        "det_B_eta": B.det(),
        "B_eta_good": is_good(B),
    })
    return {"results": out, "checks": []}


def cmd_rfun(args) -> dict:
    theta = parse_quad(args.theta)
    frame = ThetaFrame(theta)
    if args.kind == "eta":
        R = r_fn(frame, 0, frame.eta, variant="minus")
    elif args.kind == "eta+":
        R = r_fn(frame, 0, frame.eta, variant="plus")
    elif args.kind == "theta":
        R = theta_fn(frame)
    elif args.kind == "finf":
        R = f_inf()
    elif args.kind == "beta":
        if args.beta is None:
            raise UsageError("--kind beta needs --beta")
        alpha = parse_quad(args.alpha, theta.d) if args.alpha else frame.num(0)
        R = r_fn(frame, alpha, parse_quad(args.beta, theta.d), variant=args.variant)
    else:  # cone
        if args.rho1 is None or args.rho2 is None:
            raise UsageError("--kind cone needs --rho1 and --rho2")
        rho2 = float("inf") if args.rho2.lower() in ("inf", "+inf", "oo") else Fraction(args.rho2)
        R = cone_sum(Fraction(args.rho1), rho2)
    res = {"kind": args.kind, "rational_function": R.to_json()}
    if args.kind in ("eta", "eta+"):
        s = slopes(frame, frame.eta)
        res["slopes"] = {"rho": _frac(s.rho), "rho_plus": _frac(s.rho_plus)}
    return {"results": res, "checks": []}


def _parse_complex(text: str, prec: int) -> mpmath.mpc:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (1, 2):
        raise UsageError(f"complex value {text!r} must be 're' or 're,im'")
    try:
        with mpmath.workprec(prec + GUARD_BITS):
            return mpmath.mpc(*[mpmath.mpf(p) for p in parts])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad complex value {text!r}") from exc


def cmd_eval(args) -> dict:
    prec = args.prec
    cfg = EvalConfig(prec)
    w = parse_quad(args.w)
    p = Numeric(_parse_complex(args.u, prec), _parse_complex(args.v, prec), prec)
    val = eval_fplus(w, p, cfg) if args.plus else eval_f(w, p, cfg)
    res = EvalResult(val, prec - cfg.tail_margin, True, 0).to_json()
    res["series"] = "f+" if args.plus else "f"
    return {"results": res, "checks": []}


def cmd_verify(args) -> dict:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    suites = run_suites(names, args.prec, args.trials, args.rng_seed)
    checks = [dict(c, suite=name) for name, cs in suites.items() for c in cs]
    return {"results": {"suites": names}, "checks": checks}


def cmd_semifree(args) -> dict:
    try:
        with open(args.input, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    t = SemiFreeTuple.from_json(obj, args.prec)
    v = run(t, certify=args.certify or args.crosscheck, crosscheck=args.crosscheck,
            cfg=EvalConfig(args.prec))
    checks = []
    if v.crosscheck is not None:
        checks = [{"name": f"crosscheck {r['base']}", "pass": r["pass"], "residual": r["residual"]}
                  for r in v.crosscheck["classes"]]
    return {"results": v.to_json(), "checks": checks}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hmx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("field", help="Perron number, module, order and unit data")
    p.add_argument("--theta")
    p.add_argument("--w")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("rfun", help="emit a closed-form rational function as JSON")
    p.add_argument("--kind", required=True, choices=["eta", "eta+", "theta", "cone", "finf", "beta"])
    p.add_argument("--theta", default="sqrt(2)-1")
    p.add_argument("--rho1")
    p.add_argument("--rho2")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--variant", choices=["minus", "plus"], default="minus")
    p.set_defaults(func=cmd_rfun)

    p = sub.add_parser("eval", help="evaluate f_w or f+ at a point")
    p.add_argument("--w", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--prec", type=int, default=None)
    p.add_argument("--plus", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run identity suites")
    p.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    p.add_argument("--prec", type=int, default=None)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("semifree", help="decide semi-freeness of coset points")
    p.add_argument("--input", required=True)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--crosscheck", action="store_true")
    p.add_argument("--prec", type=int, default=None)
    p.set_defaults(func=cmd_semifree)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "prec", None) is None and hasattr(args, "prec"):
            args.prec = _default_prec()
        if getattr(args, "prec", 96) < 32:
            raise UsageError("--prec must be at least 32")
        report = args.func(args)
    except UsageError as exc:
        print(f"hmx: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HmxError as exc:
        print(f"hmx: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    passed = all(c["pass"] for c in report["checks"])
    inputs = {k: v for k, v in vars(args).items() if k != "func"}
    out = {"command": args.command, "inputs": inputs, "results": report["results"],
           "checks": report["checks"], "pass": passed,
           "precision": {"prec": getattr(args, "prec", None)},
           "timing": {"seconds": round(time.perf_counter() - start, 3)}}
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
