import numpy as np
import pytest


def rand_matrix(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def rand_herm(rng, n):
    a = rand_matrix(rng, n)
    return (a + a.conj().T) / 2


def rand_psd(rng, n, rank=None):
    a = rand_matrix(rng, n, n if rank is None else rank)
    return a @ a.conj().T


def rand_unitary(rng, n):
    q, r = np.linalg.qr(rand_matrix(rng, n))
    return q * (np.diag(r) / abs(np.diag(r)))


def rand_density(rng, n):
    m = rand_psd(rng, n)
    return m / np.trace(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
