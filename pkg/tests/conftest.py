import pytest

from juliamanhattan.orbits import build_database


@pytest.fixture(scope="session")
def db_power2():
    """z**2, both maps equal, periods up to 8."""
    return build_database(2, 0, 0, 8)


@pytest.fixture(scope="session")
def db_power3():
    return build_database(3, 0, 0, 6)


@pytest.fixture(scope="session")
def db_pair():
    """(0.05, -0.05) at a moderate period, for unit-level checks."""
    return build_database(2, 0.05, -0.05, 12)


@pytest.fixture(scope="session")
def db_same():
    """c1 = c2 = 0.05: identical spectra."""
    return build_database(2, 0.05, 0.05, 12)


# ---------------------------------------------------------------- acceptance lines

_ACCEPTANCE = {}


@pytest.fixture
def acceptance(capsys):
    """``acceptance(n, passed, detail)`` prints and records one criterion line."""
    def record(n, passed, detail):
        line = f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[n] = line
        with capsys.disabled():
            print("\n" + line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
