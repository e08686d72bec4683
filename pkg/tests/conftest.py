import pytest

from lemnilab.choreography import Choreography, find_moduli
from lemnilab.invariants import canonical_set
from lemnilab.potential import fit_params

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def moduli5():
    return find_moduli(5)


@pytest.fixture(scope="session", params=[1, 2], ids=["k1", "k2"])
def five(request, moduli5):
    """(index, choreography, pair set, fitted params) for each five-body solution."""
    idx = request.param
    ch = Choreography(5, moduli5[idx - 1])
    ps = canonical_set(5, idx)
    return idx, ch, ps, fit_params(ch, ps).params


@pytest.fixture(scope="session")
def three():
    ch = Choreography(3, find_moduli(3)[0])
    ps = canonical_set(3, 1)
    return ch, ps, fit_params(ch, ps).params
