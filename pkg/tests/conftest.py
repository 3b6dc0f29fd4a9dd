import numpy as np
import pytest

from collective_dephasing.register import OperatorCoefficients, PureState


def random_state(rng, n, support=None):
    """Haar-ish random state; ``support`` restricts to given configuration indices."""
    amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    if support is not None:
        mask = np.zeros(2 ** n, dtype=bool)
        mask[list(support)] = True
        amps[~mask] = 0
    return PureState(n, amps / np.linalg.norm(amps))


def random_density(rng, n, rank=None):
    dim = 2 ** n
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = a @ a.conj().T
    m = (m + m.conj().T) / 2
    m /= np.trace(m).real
    return OperatorCoefficients(n, m)


@pytest.fixture
def rng():
    return np.random.default_rng(20260416)


# (criterion, passed, line) records filled by test_acceptance
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
