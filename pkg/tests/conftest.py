import pytest

from irs_circuit import UnitCellParams

nH = 1e-9
pF = 1e-12
GHz = 1e9


@pytest.fixture
def low_loss_params():
    """Low-loss cell with a wide phase swing."""
    return UnitCellParams(2.3 * nH, 0.56 * nH, 2.0)


@pytest.fixture
def dip_params():
    """Cell with the deepest amplitude dip."""
    return UnitCellParams(2.5 * nH, 0.4 * nH, 4.0)


@pytest.fixture
def mid_params():
    return UnitCellParams(2.4 * nH, 0.5 * nH, 3.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
