import numpy as np
import pytest

from cvrl.fock import DensityState
from cvrl.optimize import OptimizerConfig

ACCEPTANCE_LINES = []


def random_density(n, rng, rank=None):
    rank = n if rank is None else rank
    G = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_unitary(n, rng):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_matrix(n, rng):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def as_state(rho, label=""):
    return DensityState.from_matrix(rho, label=label)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def quick_cfg():
    """A small optimizer budget for tests that only need a sane answer."""
    return OptimizerConfig(starts=3, max_evals=400)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
