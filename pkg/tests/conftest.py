import pytest

from cdvbound import maps
from cdvbound.refine import build_prescribed_edgewidth


@pytest.fixture(scope="session")
def tetra():
    return maps.load("tetrahedron")


@pytest.fixture(scope="session")
def k7():
    return maps.load("k7_torus")


@pytest.fixture(scope="session")
def k6():
    return maps.load("k6_projective")


_refined = {}


@pytest.fixture(scope="session")
def refined():
    """Cached refinements keyed by (name, k)."""

    def get(name, k):
        if (name, k) not in _refined:
            _refined[(name, k)] = build_prescribed_edgewidth(maps.load(name), k)
        return _refined[(name, k)]

    return get


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
