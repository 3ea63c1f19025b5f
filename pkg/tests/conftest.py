import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("planelab", deadline=None, derandomize=True, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("planelab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance criteria report: one line per criterion, echoed live and
# repeated in the terminal summary
_ACCEPTANCE = {}


@pytest.fixture
def criterion(capsys):
    def report(num, ok, detail):
        line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[num] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_runtest_makereport(item, call):
    # a criterion test that raised before reporting still gets a FAIL line
    num = getattr(item.function, "criterion_number", None)
    if num is not None and call.when == "call" and call.excinfo is not None and num not in _ACCEPTANCE:
        _ACCEPTANCE[num] = f"criterion {num:>2}: FAIL  {call.excinfo.typename}: {call.excinfo.value}"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[num])
