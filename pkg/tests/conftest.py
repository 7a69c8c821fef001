import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mtypes.generators import random_coalgebra, random_signature

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


@st.composite
def signatures(draw, max_shapes=3, max_arity=2):
    return random_signature(random.Random(draw(st.integers(0, 2**32))), max_shapes, max_arity)


@st.composite
def coalgebras(draw, max_states=5, max_shapes=3, max_arity=2):
    rng = random.Random(draw(st.integers(0, 2**32)))
    sig = random_signature(rng, max_shapes, max_arity)
    return random_coalgebra(rng, sig, draw(st.integers(1, max_states)))


@pytest.fixture
def record_acceptance(request):
    """Tests in the acceptance suite report ``(number, detail)`` here."""

    def record(number: int, detail: str) -> None:
        request.node.acceptance = (number, detail)

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    number = getattr(item, "acceptance_number", None)
    if number is None or report.when != "call":
        return
    detail = getattr(item, "acceptance", (number, ""))[1]
    ACCEPTANCE_RESULTS[number] = ("PASS" if report.passed else "FAIL", detail or item.name)


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            item.acceptance_number = marker.args[0]


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): acceptance criterion number n")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
