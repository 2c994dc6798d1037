"""Unitary gates, circuits, and their application to state vectors.

Gates are validated for unitarity eagerly at construction so a bad oracle
fails fast.  ``apply`` updates only the addressed qubits' amplitude strides;
the fully kron-expanded matrix is never materialized on the hot path (it
exists as :func:`expand_to_register`, used by tests as an equivalence oracle).

Control convention: for controlled gates the control qubit is the first
(most significant) qubit of the gate's register, i.e. ``controlled(U)`` is
the block-diagonal ``[[I, 0], [0, U]]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .state import StateVector, _check_n_qubits, _validate_positions

UNITARY_TOL = 1e-9

_SQRT2_INV = 1.0 / np.sqrt(2.0)

_FIXED_GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": _SQRT2_INV * np.array([[1, 1], [1, -1]], dtype=complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}
_GATE_ALIASES = {"NOT": "X"}


@dataclass(frozen=True)
class GateMatrix:
    """Square unitary matrix acting on ``log2(dim)`` qubits."""

    dim: int
    matrix: np.ndarray
    name: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DomainError(f"matrix has shape {m.shape}, expected ({self.dim}, {self.dim})")
        n = int(np.log2(self.dim))
        if 2**n != self.dim:
            raise DomainError(f"gate dimension {self.dim} is not a power of two")
        if np.max(np.abs(m @ m.conj().T - np.eye(self.dim))) >= UNITARY_TOL:
            raise DomainError("matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.dim, self.matrix.conj().T)


def standard_gate(name: str, phase: float | None = None) -> GateMatrix:
    """Named gate: one of I, X/NOT, Y, Z, H, SWAP, or R(phase).

    ``R`` is the phase-shift gate diag(1, e^{i*phase}) and requires ``phase``.
    """
    key = _GATE_ALIASES.get(name.upper(), name.upper())
    if key == "R":
        if phase is None:
            raise DomainError("gate R requires a phase")
        return GateMatrix(
            2, np.diag([1.0, np.exp(1j * phase)]), name=f"R({phase!r})"
        )
    if key not in _FIXED_GATES:
        raise DomainError(f"unknown gate name {name!r}")
    return GateMatrix(len(_FIXED_GATES[key]), _FIXED_GATES[key], name=key)


def kron(gates: list[GateMatrix]) -> GateMatrix:
    """Kronecker product of gates in list order (first gate most significant)."""
    if not gates:
        raise DomainError("kron of an empty gate list")
    matrix = gates[0].matrix
    for g in gates[1:]:
        matrix = np.kron(matrix, g.matrix)
    return GateMatrix(matrix.shape[0], matrix)


def controlled(u: GateMatrix) -> GateMatrix:
    """Add a control qubit as the new most significant qubit of ``u``."""
    d = u.dim
    matrix = np.eye(2 * d, dtype=complex)
    matrix[d:, d:] = u.matrix
    name = f"C-{u.name}" if u.name else None
    return GateMatrix(2 * d, matrix, name=name)


def apply(gate: GateMatrix, targets, psi: StateVector) -> StateVector:
    """Apply ``gate`` to the listed qubit positions, identity elsewhere.

    ``targets[0]`` is the gate's most significant qubit.  A fresh state is
    returned; the input is never mutated.
    """
    positions = _validate_positions(psi.n_qubits, targets)
    if gate.dim != 2 ** len(positions):
        raise DomainError(
            f"gate of dim {gate.dim} cannot act on {len(positions)} qubits"
        )
    n = psi.n_qubits
    grid = psi.amps.reshape([2] * n)
    rest = [ax for ax in range(n) if ax not in positions]
    # Bring target axes to the front, contract with the gate, restore order.
    grid = np.transpose(grid, positions + rest)
    flat = grid.reshape(gate.dim, -1)
    flat = gate.matrix @ flat
    grid = flat.reshape([2] * n)
    inverse = np.argsort(positions + rest)
    amps = np.transpose(grid, inverse).reshape(-1)
    return StateVector(n, amps)


def expand_to_register(gate: GateMatrix, targets, n_qubits: int) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of ``gate`` on ``targets`` within a register.

    Quadratically more expensive than :func:`apply`; used as a test oracle.
    """
    positions = _validate_positions(n_qubits, targets)
    rest = [ax for ax in range(n_qubits) if ax not in positions]
    full = np.kron(gate.matrix, np.eye(2 ** len(rest), dtype=complex))
    # The kron above acts on the permuted register (targets first); conjugate
    # by the permutation that maps register order to that layout.
    order = positions + rest
    perm = _axis_permutation_matrix(order, n_qubits)
    return perm.T @ full @ perm


def _axis_permutation_matrix(order: list[int], n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    perm = np.zeros((dim, dim))
    for i in range(dim):
        bits = format(i, f"0{n_qubits}b")
        j = int("".join(bits[q] for q in order), 2)
        perm[j, i] = 1.0
    return perm


@dataclass(frozen=True)
class Circuit:
    """Ordered gate applications on a fixed-size register."""

    n_qubits: int
    steps: list[tuple[GateMatrix, tuple[int, ...]]] = field(default_factory=list)

    def __post_init__(self):
        _check_n_qubits(self.n_qubits)
        for gate, targets in self.steps:
            positions = _validate_positions(self.n_qubits, targets)
            if gate.dim != 2 ** len(positions):
                raise DomainError(
                    f"step gate dim {gate.dim} does not match {len(positions)} targets"
                )

    def matrix(self) -> np.ndarray:
        """Full unitary of the circuit (test/inspection path, O(4^n))."""
        total = np.eye(2**self.n_qubits, dtype=complex)
        for gate, targets in self.steps:
            total = expand_to_register(gate, list(targets), self.n_qubits) @ total
        return total

    def to_json(self) -> str:
        doc = {"n_qubits": self.n_qubits, "steps": []}
        for gate, targets in self.steps:
            entry: dict = {"targets": list(targets)}
            if gate.name and gate.name in _FIXED_GATES:
                entry["gate"] = gate.name
            elif gate.name and gate.name.startswith("R("):
                entry["gate"] = "R"
                entry["phase"] = float(gate.name[2:-1])
            else:
                entry["gate"] = [
                    [[z.real, z.imag] for z in row] for row in gate.matrix
                ]
            doc["steps"].append(entry)
        return json.dumps(doc)

    @staticmethod
    def from_json(text: str) -> "Circuit":
        doc = json.loads(text)
        steps = []
        for entry in doc["steps"]:
            spec = entry["gate"]
            if isinstance(spec, str):
                gate = standard_gate(spec, phase=entry.get("phase"))
            else:
                gate = GateMatrix(len(spec), matrix_from_json(spec))
            steps.append((gate, tuple(entry["targets"])))
        return Circuit(int(doc["n_qubits"]), steps)


def matrix_from_json(rows) -> np.ndarray:
    """Nested ``[[re, im], ...]`` rows back to a complex matrix."""
    return np.array(
        [[complex(re, im) for re, im in row] for row in rows], dtype=complex
    )


def run_circuit(circuit: Circuit, psi: StateVector) -> StateVector:
    if circuit.n_qubits != psi.n_qubits:
        raise DomainError(
            f"circuit on {circuit.n_qubits} qubits cannot run on {psi.n_qubits}-qubit state"
        )
    for gate, targets in circuit.steps:
        psi = apply(gate, list(targets), psi)
    return psi


def function_oracle(f, n_in: int, m_out: int) -> GateMatrix:
    """Reversible embedding of ``f``: the unitary |x, y> -> |x, y XOR f(x)>.

    ``f`` maps integers in [0, 2^n_in) to integers in [0, 2^m_out); with the
    output register prepared at |0...0> this realizes |x, 0> -> |x, f(x)>.
    """
    if n_in < 1 or m_out < 1:
        raise DomainError("function oracle needs at least one input and output qubit")
    _check_n_qubits(n_in + m_out)
    dim = 2 ** (n_in + m_out)
    matrix = np.zeros((dim, dim), dtype=complex)
    out_dim = 2**m_out
    for x in range(2**n_in):
        value = int(f(x))
        if not 0 <= value < out_dim:
            raise DomainError(
                f"f({x}) = {value} does not fit in {m_out} output bits"
            )
        for y in range(out_dim):
            matrix[x * out_dim + (y ^ value), x * out_dim + y] = 1.0
    return GateMatrix(dim, matrix)
