"""Complex state vectors over qubit registers.

A register of ``n`` qubits is a dense vector of ``2**n`` complex amplitudes.
Basis indices follow the bitstring read left to right: the leftmost ket
symbol is the most significant bit, so ``|10>`` is index 2 of a 2-qubit
register.  Qubit positions use the same convention: qubit 0 is the leftmost
(most significant) qubit.

States are immutable after construction and never renormalized silently:
a vector that is not normalized within ``NORM_TOL`` is rejected, and callers
that want renormalization must ask for it via :func:`normalize`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .rng import RngStream

MAX_QUBITS = 24          # dense 2^24 complex vector is the desk-scale budget
NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-9


def _check_n_qubits(n_qubits: int) -> int:
    n = int(n_qubits)
    if n < 1:
        raise DomainError(f"need at least one qubit, got {n}")
    if n > MAX_QUBITS:
        raise ConfigError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitude vector over ``2**n_qubits`` basis states."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        n = _check_n_qubits(self.n_qubits)
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (2**n,):
            raise DomainError(
                f"amplitude vector has shape {amps.shape}, expected ({2**n},)"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise DomainError(f"state not normalized: sum |c_i|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix whose eigenvalues are the possible measured values."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DomainError(f"matrix has shape {m.shape}, expected square of dim {self.dim}")
        if np.max(np.abs(m - m.conj().T)) >= HERMITIAN_TOL:
            raise DomainError("observable matrix is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvector columns."""
        return np.linalg.eigh(self.matrix)


@dataclass(frozen=True)
class MeasurementOutcome:
    basis_index: int
    collapsed: StateVector
    probability: float


def normalize(amps: np.ndarray, n_qubits: int | None = None) -> StateVector:
    """Build a state from an unnormalized amplitude vector, explicitly rescaling."""
    amps = np.asarray(amps, dtype=complex)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise DomainError("cannot normalize the zero vector")
    if n_qubits is None:
        n_qubits = int(np.log2(len(amps)))
        if 2**n_qubits != len(amps):
            raise DomainError(f"length {len(amps)} is not a power of two")
    return StateVector(n_qubits, amps / norm)


def basis_state(n_qubits: int, index: int) -> StateVector:
    """The standard basis vector ``|index>`` of an ``n_qubits`` register."""
    n = _check_n_qubits(n_qubits)
    if not 0 <= index < 2**n:
        raise DomainError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def from_bits(bits: str) -> StateVector:
    """Basis state from a bitstring, e.g. ``"10"`` -> index 2 of 2 qubits."""
    if not bits or any(b not in "01" for b in bits):
        raise DomainError(f"invalid bitstring {bits!r}")
    return basis_state(len(bits), int(bits, 2))


def inner_product(bra: StateVector, ket: StateVector) -> complex:
    """The bracket <bra|ket> = sum conj(bra_i) * ket_i."""
    if bra.dim != ket.dim:
        raise DomainError(f"dimension mismatch: {bra.dim} vs {ket.dim}")
    return complex(np.vdot(bra.amps, ket.amps))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Joint state of two registers; amplitude (i, j) lands at i*dim(b) + j."""
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amps, b.amps))


def expectation(obs: Observable, psi: StateVector) -> float:
    """<psi|O|psi> as a real number; a large imaginary residue is an error."""
    if obs.dim != psi.dim:
        raise DomainError(f"dimension mismatch: observable {obs.dim}, state {psi.dim}")
    value = complex(np.vdot(psi.amps, obs.matrix @ psi.amps))
    if abs(value.imag) >= 1e-9:
        raise DomainError(f"expectation has imaginary residue {value.imag}")
    return value.real


def variance(obs: Observable, psi: StateVector) -> float:
    """<psi|(O - <O>)^2|psi>, the spread of measured values around the mean."""
    mean = expectation(obs, psi)
    shifted = obs.matrix - mean * np.eye(obs.dim)
    value = complex(np.vdot(psi.amps, shifted @ (shifted @ psi.amps)))
    if abs(value.imag) >= 1e-9:
        raise DomainError(f"variance has imaginary residue {value.imag}")
    return value.real


def measure_all(psi: StateVector, rng: RngStream) -> MeasurementOutcome:
    """Sample a full computational-basis measurement and collapse the state."""
    probs = psi.probabilities()
    index = rng.choice(probs)
    return MeasurementOutcome(
        basis_index=index,
        collapsed=basis_state(psi.n_qubits, index),
        probability=float(probs[index]),
    )


def _validate_positions(n_qubits: int, qubits) -> list[int]:
    positions = [int(q) for q in qubits]
    if len(set(positions)) != len(positions):
        raise DomainError(f"qubit positions must be distinct, got {positions}")
    for q in positions:
        if not 0 <= q < n_qubits:
            raise DomainError(f"qubit position {q} out of range for {n_qubits} qubits")
    return positions


def measure_subset(
    psi: StateVector, qubits, rng: RngStream
) -> tuple[str, StateVector]:
    """Measure the given qubit positions; return their bits and the
    renormalized post-measurement state on all qubits.

    The returned bitstring lists one '0'/'1' per requested position, in the
    order the positions were given.
    """
    positions = _validate_positions(psi.n_qubits, qubits)
    n = psi.n_qubits
    grid = psi.amps.reshape([2] * n)
    rest = [ax for ax in range(n) if ax not in positions]

    # Joint distribution over the measured qubits, in the order requested.
    probs = np.square(np.abs(grid))
    if rest:
        probs = probs.sum(axis=tuple(rest))
    probs = np.transpose(probs, [sorted(positions).index(q) for q in positions])
    flat = probs.reshape(-1)
    outcome = rng.choice(flat)
    bits = format(outcome, f"0{len(positions)}b")

    # Project onto the measured bits and renormalize.
    selector: list = [slice(None)] * n
    for q, bit in zip(positions, bits):
        selector[q] = int(bit)
    projected = np.zeros_like(grid)
    projected[tuple(selector)] = grid[tuple(selector)]
    amps = projected.reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return bits, StateVector(n, amps)


def is_product_two_subsystems(psi: StateVector, split: int) -> bool:
    """True iff the state factors across the left ``split`` qubits.

    Computed as a numerical rank-1 test of the amplitude matrix reshaped to
    ``2**split x 2**(n-split)`` (a Schmidt-rank check): the state is a
    product iff the second singular value vanishes relative to the first.
    """
    if not 1 <= split < psi.n_qubits:
        raise DomainError(f"split {split} invalid for {psi.n_qubits} qubits")
    matrix = psi.amps.reshape(2**split, -1)
    singular = np.linalg.svd(matrix, compute_uv=False)
    return bool(singular[1] / singular[0] < 1e-9)
