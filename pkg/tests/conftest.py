import os

import pytest
from hypothesis import HealthCheck, settings

from expsum_lab.ffield import FieldSpec
from expsum_lab.mpoly import decompose, parse

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# the three worked jobs: (p, n, f)
JOB_A = (5, 2, "x1^2*x2 + x2^2")
JOB_B = (2, 2, "x1^3*x2 + x1*x2^3 + x1^3")
JOB_C = (7, 2, "x1^3 + x2^3 + x1")
NEGATIVE = (5, 2, "x1^2*x2 + x1^2")


def make(p, n, src, a=1):
    F = FieldSpec(p, a)
    return decompose(parse(src, n, F))


@pytest.fixture(scope="session")
def job_a():
    return make(*JOB_A)


@pytest.fixture(scope="session")
def job_b():
    return make(*JOB_B)


@pytest.fixture(scope="session")
def job_c():
    return make(*JOB_C)


@pytest.fixture(scope="session")
def negative():
    return make(*NEGATIVE)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in __import__("sys").modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
