import pytest

from gramforge import compile_language, parse_grammar, parse_model, resolve_references
from helpers import AUTOMATON_TEXT, PINGPONG_TEXT


@pytest.fixture(scope="session")
def automaton_grammar():
    return parse_grammar(AUTOMATON_TEXT, "Automaton.mcg")


@pytest.fixture(scope="session")
def automaton(automaton_grammar):
    return compile_language(automaton_grammar)


@pytest.fixture
def pingpong(automaton):
    m = parse_model(automaton, PINGPONG_TEXT, "PingPong.aut")
    assert resolve_references(m, automaton) == []
    return m


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")
    config.acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    number, title = marker.args
    results = item.config.acceptance_results
    _, ok = results.get(number, (title, True))
    results[number] = (title, ok and rep.passed)


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")
