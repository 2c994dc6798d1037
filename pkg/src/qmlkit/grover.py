"""Grover search over black-box sign oracles.

The oracle is conceptually a diagonal gate flipping the amplitude sign of
marked inputs; searches apply that sign flip amplitude-wise in O(2^n) per
round and never materialize the diagonal above ``ORACLE_MATRIX_CAP`` bits.
The inversion around the mean is likewise applied arithmetically (every
amplitude is reflected about the current mean amplitude).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError
from .gates import GateMatrix
from .rng import RngStream
from .state import MAX_QUBITS, StateVector

ORACLE_MATRIX_CAP = 12


@dataclass(frozen=True)
class SignOracle:
    """Black-box predicate on n-bit inputs, acting as |x> -> (-1)^f(x) |x>.

    ``predicate_vectorized``, when provided, must agree with ``predicate``
    on every input; it lets array-backed predicates mark all inputs in one
    shot instead of 2^n Python calls.
    """

    n_bits: int
    predicate: Callable[[int], bool]
    marked_count_hint: int | None = None
    predicate_vectorized: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not 1 <= self.n_bits <= MAX_QUBITS:
            raise DomainError(f"oracle bit width {self.n_bits} out of range")

    def signs(self) -> np.ndarray:
        """The +-1 diagonal induced by the predicate."""
        if self.predicate_vectorized is not None:
            marks = np.asarray(
                self.predicate_vectorized(np.arange(2**self.n_bits)), dtype=bool
            )
        else:
            marks = np.fromiter(
                (bool(self.predicate(x)) for x in range(2**self.n_bits)),
                dtype=bool,
                count=2**self.n_bits,
            )
        return np.where(marks, -1.0, 1.0)


@dataclass(frozen=True)
class GroverResult:
    measured_index: int
    iterations_used: int
    final_state: StateVector
    success_probability: float


def oracle_gate(o: SignOracle) -> GateMatrix:
    """Materialize the oracle's diagonal as an explicit gate (small n only)."""
    if o.n_bits > ORACLE_MATRIX_CAP:
        raise ConfigError(
            f"oracle matrix for {o.n_bits} bits exceeds the {ORACLE_MATRIX_CAP}-bit cap"
        )
    return GateMatrix(2**o.n_bits, np.diag(o.signs().astype(complex)))


def diffusion(n_bits: int) -> GateMatrix:
    """Inversion around the mean: 2A - I with A_ij = 1/2^n."""
    if n_bits < 1:
        raise DomainError("diffusion needs at least one qubit")
    dim = 2**n_bits
    matrix = np.full((dim, dim), 2.0 / dim, dtype=complex)
    matrix -= np.eye(dim)
    return GateMatrix(dim, matrix)


def default_iterations(n_bits: int, marked_count: int) -> int:
    """floor(pi/4 * sqrt(2^n / k)), the amplitude-amplification optimum."""
    if marked_count <= 0:
        marked_count = 1
    return int(math.floor(math.pi / 4.0 * math.sqrt(2**n_bits / marked_count)))


def grover_search(
    o: SignOracle, rng: RngStream, iterations: int | None = None
) -> GroverResult:
    """Uniform superposition, ``iterations`` rounds of oracle + inversion
    around the mean, then a full measurement.

    With no iteration count given, uses the optimum for the oracle's
    ``marked_count_hint`` (assumed 1 when absent).  An unmarked measured
    index is reported, never raised: with nothing marked the state stays
    uniform and ``success_probability`` is 0.
    """
    n = o.n_bits
    dim = 2**n
    if iterations is None:
        iterations = default_iterations(n, o.marked_count_hint or 1)
    signs = o.signs()
    amps = np.full(dim, 1.0 / math.sqrt(dim))
    for _ in range(iterations):
        amps = signs * amps
        amps = 2.0 * amps.mean() - amps
    probs = amps**2
    measured = rng.choice(probs / probs.sum())
    final = StateVector(n, amps / np.linalg.norm(amps))
    success = float(probs[signs < 0].sum())
    return GroverResult(
        measured_index=measured,
        iterations_used=iterations,
        final_state=final,
        success_probability=success,
    )
