import pytest

from co2calc.cli import resolve_source
from co2calc.parser import parse_file
from co2calc.runtime import Reducer, normalise


def load(name):
    sf = parse_file(str(resolve_source(name)))
    return sf, normalise(sf.system, sf.model, sf.defs), Reducer(sf.model, sf.defs)


@pytest.fixture
def corpus():
    return load


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
