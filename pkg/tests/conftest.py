import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion; assertion failures mark it FAIL."""
    state = {}

    def record(number, title, ok, detail):
        state.update(number=number, title=title, ok=bool(ok), detail=detail)
        return ok

    yield record
    if state:
        failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else False
        verdict = "PASS" if state["ok"] and not failed else "FAIL"
        ACCEPTANCE_LINES[state["number"]] = f"[{verdict}] criterion {state['number']}: {state['title']} ({state['detail']})"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
