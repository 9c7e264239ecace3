import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE = {}


def record_criterion(number: int, title: str, failures: list):
    ACCEPTANCE[number] = (title, list(failures))


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, failures = ACCEPTANCE[number]
        verdict = "PASS" if not failures else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {title}")
        for f in failures:
            terminalreporter.write_line(f"      {f}")
