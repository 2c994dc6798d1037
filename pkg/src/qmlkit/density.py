"""Density matrices for pure and mixed states.

Beyond the textbook constructors and the trace-rule expectation, this module
provides the partial trace, which the neural-network label readout and the
principal-component machinery both need to reduce a register to a sub-register.
"""
from __future__ import annotations

import warnings
from functools import lru_cache
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .state import Observable, StateVector, _validate_positions

DENSITY_TOL = 1e-9
_PSD_CHECK_MAX_DIM = 2**12   # eigenvalue check is cubic; skip above this


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-1 matrix."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DomainError(f"matrix has shape {m.shape}, expected ({self.dim}, {self.dim})")
        n = int(np.log2(self.dim))
        if 2**n != self.dim:
            raise DomainError(f"density dimension {self.dim} is not a power of two")
        if np.max(np.abs(m - m.conj().T)) >= DENSITY_TOL:
            raise DomainError("density matrix is not Hermitian")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) >= DENSITY_TOL:
            raise DomainError(f"density matrix has trace {trace}, expected 1")
        if self.dim <= _PSD_CHECK_MAX_DIM:
            smallest = float(np.linalg.eigvalsh(m)[0])
            if smallest < -DENSITY_TOL:
                raise DomainError(f"density matrix has negative eigenvalue {smallest}")
        else:
            warnings.warn(
                f"skipping PSD eigenvalue check for dim {self.dim} > {_PSD_CHECK_MAX_DIM}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    @classmethod
    def _trusted(cls, dim: int, matrix: np.ndarray) -> "DensityMatrix":
        # Skip validation for matrices whose validity is guaranteed by the
        # construction itself (outer products of unit states, reductions of
        # valid densities).  All externally supplied matrices go through
        # __init__ and are checked.
        rho = object.__new__(cls)
        matrix.setflags(write=False)
        object.__setattr__(rho, "dim", dim)
        object.__setattr__(rho, "matrix", matrix)
        return rho


def pure_density(psi: StateVector) -> DensityMatrix:
    """The rank-1 outer product |psi><psi|."""
    return DensityMatrix._trusted(psi.dim, np.outer(psi.amps, psi.amps.conj()))


def mixed_density(parts: list[tuple[float, StateVector]]) -> DensityMatrix:
    """Convex combination sum_i p_i |psi_i><psi_i|."""
    if not parts:
        raise DomainError("mixed state needs at least one component")
    probs = np.array([p for p, _ in parts], dtype=float)
    if np.any(probs < 0):
        raise DomainError(f"negative probability in {probs}")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise DomainError(f"probabilities sum to {probs.sum()}, expected 1")
    dim = parts[0][1].dim
    matrix = np.zeros((dim, dim), dtype=complex)
    for p, psi in parts:
        if psi.dim != dim:
            raise DomainError("mixed-state components must share a dimension")
        matrix += p * np.outer(psi.amps, psi.amps.conj())
    return DensityMatrix(dim, matrix)


def trace_expectation(rho: DensityMatrix, obs: Observable) -> float:
    """<O> = Tr(rho O) for a pure or mixed state."""
    if rho.dim != obs.dim:
        raise DomainError(f"dimension mismatch: density {rho.dim}, observable {obs.dim}")
    value = complex(np.trace(rho.matrix @ obs.matrix))
    if abs(value.imag) >= 1e-9:
        raise DomainError(f"trace expectation has imaginary residue {value.imag}")
    return value.real


@lru_cache(maxsize=256)
def _index_groups(n: int, kept: tuple[int, ...]) -> list[np.ndarray]:
    """For each kept-group index, the register indices it covers (one entry
    per assignment of the traced qubits)."""
    traced = [q for q in range(n) if q not in kept]
    groups = []
    for kept_bits in range(2 ** len(kept)):
        base = 0
        for pos, q in enumerate(kept):
            if kept_bits >> (len(kept) - 1 - pos) & 1:
                base |= 1 << (n - 1 - q)
        out = np.empty(2 ** len(traced), dtype=np.intp)
        for t in range(2 ** len(traced)):
            idx = base
            for pos, q in enumerate(traced):
                if t >> (len(traced) - 1 - pos) & 1:
                    idx |= 1 << (n - 1 - q)
            out[t] = idx
        groups.append(out)
    return groups


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced density on the kept qubit positions (trace out the rest).

    Entries are assembled by direct index-pair summation: for every pair of
    kept-group indices, sum the input entries over all traced-group indices.
    """
    n = rho.n_qubits
    kept = _validate_positions(n, keep)
    if len(kept) == n:
        return rho
    rows = _index_groups(n, tuple(kept))
    dim_keep = 2 ** len(kept)
    reduced = np.empty((dim_keep, dim_keep), dtype=complex)
    for i in range(dim_keep):
        for j in range(dim_keep):
            reduced[i, j] = np.sum(rho.matrix[rows[i], rows[j]])
    return DensityMatrix._trusted(dim_keep, reduced)
