import pytest
from hypothesis import HealthCheck, settings

from robustnet import load_fixture, sat_to_cut, sat_to_shortest_path

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sat3_cnf():
    return load_fixture("sat3")


@pytest.fixture(scope="session")
def unsat_cnf():
    return load_fixture("unsat8")


@pytest.fixture(scope="session")
def sat3_path(sat3_cnf):
    return sat_to_shortest_path(sat3_cnf)


@pytest.fixture(scope="session")
def sat3_cut(sat3_cnf):
    return sat_to_cut(sat3_cnf)


@pytest.fixture(scope="session")
def unsat_path(unsat_cnf):
    return sat_to_shortest_path(unsat_cnf)


ACCEPTANCE_LINES = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
