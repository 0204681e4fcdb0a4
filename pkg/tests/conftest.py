import pytest

from cubicfields import census, enumeration

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def plus_2e6():
    return enumeration.enumerate_orbits(1, 2 * 10**6)


@pytest.fixture(scope="session")
def minus_2e6():
    return enumeration.enumerate_orbits(-1, 2 * 10**6)


@pytest.fixture(scope="session")
def all_classes_1e4():
    return {s: census.all_classes(s, 10**4) for s in (1, -1)}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
