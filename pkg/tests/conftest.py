import pytest

from nlspec.geometry import LameParameters

ACCEPTANCE_LINES = []


def record(criterion: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((criterion, f"criterion {criterion:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def steel():
    return LameParameters(1.0, 1.0)


@pytest.fixture(scope="session")
def disk_unit(steel):
    from nlspec.spectra import disk_spectrum
    return disk_spectrum(1.0, steel, tau_max=10000.0)
