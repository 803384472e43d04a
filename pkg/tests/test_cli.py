import json

import pytest

from hmx.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from hmx.qfield import parse_quad
from hmx.rfun import RationalFn2, cone_sum, r_fn, rf_equal
from hmx.verify import SUITES


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


# ---------------------------------------------------------------------------
# field


def test_field_theta(capsys):
    code, rep, _ = run(capsys, "field", "--theta", "sqrt(2)-1")
    assert code == EXIT_OK and rep["pass"]
    res = rep["results"]
    assert res["B_eta"] == [[5, 2], [2, 1]] and res["det_B_eta"] == 1
    assert res["continued_fraction_of_inverse"]["preperiod"] == []
    assert res["B_eta_good"]


def test_field_from_w(capsys):
    code, rep, _ = run(capsys, "field", "--w", "sqrt(2)/2")
    assert code == EXIT_OK
    res = rep["results"]
    assert parse_quad(res["theta"]) == parse_quad("sqrt(2)-1")
    assert abs(res["reduction"]["det_D"]) == 1


@pytest.mark.parametrize("argv", [("field", "--theta", "1/3"), ("field",),
                                  ("field", "--theta", "sqrt(2)-1", "--w", "sqrt(2)"),
                                  ("field", "--theta", "sqrt(2)+1")])
def test_field_usage_errors(capsys, argv):
    code, rep, err = run(capsys, *argv)
    assert code == EXIT_USAGE and rep is None and err.startswith("hmx:")


# ---------------------------------------------------------------------------
# rfun


def test_rfun_eta_matches_library(capsys, frame):
    code, rep, _ = run(capsys, "rfun", "--kind", "eta")
    assert code == EXIT_OK
    R = RationalFn2.from_json(rep["results"]["rational_function"])
    assert rf_equal(R, r_fn(frame, 0, frame.eta))
    assert rep["results"]["slopes"] == {"rho": "2/5", "rho_plus": "3/7"}


@pytest.mark.parametrize("kind", ["eta+", "theta", "finf"])
def test_rfun_kinds(capsys, kind):
    code, rep, _ = run(capsys, "rfun", "--kind", kind)
    assert code == EXIT_OK and rep["results"]["kind"] == kind


def test_rfun_beta_and_cone(capsys, frame):
    code, rep, _ = run(capsys, "rfun", "--kind", "beta", "--beta", "2+sqrt(2)", "--alpha", "1/2",
                       "--variant", "plus")
    assert code == EXIT_OK
    R = RationalFn2.from_json(rep["results"]["rational_function"])
    assert rf_equal(R, r_fn(frame, frame.num("1/2"), frame.num("2+sqrt(2)"), variant="plus"))
    code, rep, _ = run(capsys, "rfun", "--kind", "cone", "--rho1", "1/3", "--rho2", "1/3")
    assert RationalFn2.from_json(rep["results"]["rational_function"]).is_zero()
    code, rep, _ = run(capsys, "rfun", "--kind", "cone", "--rho1", "0", "--rho2", "inf")
    assert code == EXIT_OK
    assert rf_equal(RationalFn2.from_json(rep["results"]["rational_function"]),
                    cone_sum(0, float("inf")))


@pytest.mark.parametrize("argv", [("rfun", "--kind", "beta"), ("rfun", "--kind", "cone", "--rho1", "0"),
                                  ("rfun", "--kind", "nope"),
                                  ("rfun", "--kind", "beta", "--beta", "sqrt(2)/2")])
def test_rfun_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


# ---------------------------------------------------------------------------
# eval


def test_eval_value_and_zero(capsys):
    code, rep, _ = run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "0", "--v", "0.5")
    assert code == EXIT_OK
    res = rep["results"]
    assert res["series"] == "f"
    code, rep2, _ = run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "0.3,0.1", "--v", "0.5", "--plus")
    assert code == EXIT_OK and rep2["results"]["series"] == "f+"
    assert rep2["precision"]["prec"] == 96


def test_eval_outside_domain(capsys):
    code, _, err = run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "0.5", "--v", "20")
    assert code == EXIT_USAGE and "DomainError" in err
    assert run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "x", "--v", "1")[0] == EXIT_USAGE
    assert run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "0.1", "--v", "1", "--prec", "8")[0] == EXIT_USAGE


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("HMX_PREC", "128")
    code, rep, _ = run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "0.3", "--v", "0.5")
    assert code == EXIT_OK and rep["precision"]["prec"] == 128
    monkeypatch.setenv("HMX_PREC", "lots")
    assert run(capsys, "eval", "--w", "sqrt(2)-1", "--u", "0.3", "--v", "0.5")[0] == EXIT_USAGE


# ---------------------------------------------------------------------------
# verify


def test_verify_all_suites(capsys):
    code, rep, _ = run(capsys, "verify", "--suite", "all", "--prec", "96", "--rng-seed", "7")
    assert code == EXIT_OK and rep["pass"]
    assert {c["suite"] for c in rep["checks"]} == set(SUITES)


def test_verify_is_deterministic(capsys):
    reports = [run(capsys, "verify", "--suite", "masser", "--rng-seed", "3")[1] for _ in range(2)]
    for r in reports:
        r.pop("timing")
    assert reports[0] == reports[1]


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "--suite", "nothing")[0] == EXIT_USAGE


# ---------------------------------------------------------------------------
# semifree


TUPLES = {
    "unit pair": ([("0", "3+2*sqrt(2)"), ("0", "1")], [1, -1]),
    "kernel triple": ([("0", "2+sqrt(2)"), ("0", "1"), ("sqrt(2)/2", "1")], [2, -1, -1]),
    "two-torsion quintuple": ([("0", "1"), ("1/2+1/2*sqrt(2)", "1"), ("1/2", "1"),
                               ("1+1/2*sqrt(2)", "1"), ("0", "2")], [-1, -1, -1, -1, 4]),
}


def write_input(tmp_path, pairs):
    obj = {"theta": "sqrt(2)-1",
           "points": [{"alpha": a, "beta": b, "base": "v1"} for a, b in pairs],
           "bases": {"v1": {"u": "0.3", "v": "0.5"}}}
    path = tmp_path / "tuple.json"
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.mark.parametrize("name", list(TUPLES))
def test_semifree_witnesses_and_crosscheck(capsys, tmp_path, name):
    pairs, witness = TUPLES[name]
    code, rep, _ = run(capsys, "semifree", "--input", write_input(tmp_path, pairs), "--crosscheck")
    assert code == EXIT_OK and rep["pass"]
    res = rep["results"]
    assert not res["semifree"]
    assert res["classes"][0]["witness"] == witness
    assert res["certificate"] is not None
    assert len(rep["checks"]) == 1 and rep["checks"][0]["pass"]


def test_semifree_independent_tuple(capsys, tmp_path):
    pairs = TUPLES["two-torsion quintuple"][0][:4]
    code, rep, _ = run(capsys, "semifree", "--input", write_input(tmp_path, pairs))
    assert code == EXIT_OK
    assert rep["results"]["semifree"] and rep["results"]["certificate"] is None


def test_semifree_bad_input(capsys, tmp_path):
    assert run(capsys, "semifree", "--input", str(tmp_path / "missing.json"))[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "semifree", "--input", str(bad))[0] == EXIT_USAGE
    path = write_input(tmp_path, [("0", "1"), ("0", "-2")])
    assert run(capsys, "semifree", "--input", path)[0] == EXIT_USAGE


def test_failing_check_gives_exit_one(capsys, monkeypatch):
    import hmx.cli as cli

    monkeypatch.setitem(cli.SUITES, "masser", lambda rng, prec, trials: [{"name": "x", "pass": False}])
    code, rep, _ = run(capsys, "verify", "--suite", "masser")
    assert code == EXIT_FAIL and not rep["pass"]


def test_report_is_json_round_trippable(capsys):
    code, rep, _ = run(capsys, "rfun", "--kind", "theta")
    assert json.loads(json.dumps(rep)) == rep
    assert set(rep) == {"command", "inputs", "results", "checks", "pass", "precision", "timing"}
