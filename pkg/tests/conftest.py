import numpy as np
import pytest

from qmlkit.state import StateVector


@pytest.fixture
def np_rng():
    return np.random.default_rng(12345)


def random_state(gen: np.random.Generator, n_qubits: int) -> StateVector:
    amps = gen.normal(size=2**n_qubits) + 1j * gen.normal(size=2**n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def random_unitary(gen: np.random.Generator, dim: int) -> np.ndarray:
    raw = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    q, r = np.linalg.qr(raw)
    return q * (np.diag(r) / np.abs(np.diag(r)))
