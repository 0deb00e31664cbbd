import os
import tempfile

# local scans persist to disk; keep test runs out of the working tree
os.environ.setdefault("MALLE_CACHE", tempfile.mkdtemp(prefix="malle-cache-"))

import pytest

from malle import irrational_branch_model, quadratic_model, s3_model

_ACCEPTANCE: list = []


@pytest.fixture(scope="session")
def quad():
    return quadratic_model()


@pytest.fixture(scope="session")
def s3():
    return s3_model()


@pytest.fixture(scope="session")
def irr():
    return irrational_branch_model()


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, dur in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split("_")[1])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({dur:.2f} s)")
