import pytest

from helpers import toy_demands, toy_routes, toy_table, toy_topology

ACCEPTANCE_LINES = []


@pytest.fixture
def toy():
    topo = toy_topology()
    return topo, toy_demands(), toy_table(), toy_routes(topo)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
