import sys

import pytest
from hypothesis import HealthCheck, settings

from hmx.qfield import parse_quad
from hmx.torus import ThetaFrame

settings.register_profile(
    "hmx", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("hmx")


@pytest.fixture(scope="session")
def frame():
    """M = Z(sqrt2+1) + Z for theta = sqrt2 - 1."""
    return ThetaFrame(parse_quad("sqrt(2)-1"))


@pytest.fixture(scope="session")
def frame5():
    """M = Z((1+sqrt5)/2) + Z for theta = (sqrt5 - 1)/2."""
    return ThetaFrame(parse_quad("(sqrt(5)-1)/2"))


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, in criterion order."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: int(k[1:])):
        ok, detail = results[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
