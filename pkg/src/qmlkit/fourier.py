"""Discrete Fourier transform, its quantum gate and circuit, and phase
estimation.

Conventions: the transform uses the +i exponent and symmetric 1/sqrt(N)
normalization, ``y_k = (1/sqrt(N)) sum_j x_j exp(2 pi i k j / N)``.  The
circuit decomposition starts with the qubit-reversal SWAP network and then
applies the Hadamard / controlled-phase ladder from the least significant
qubit upward; its full matrix equals the gate matrix exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError
from .gates import Circuit, GateMatrix, apply, controlled, standard_gate
from .rng import RngStream
from .state import StateVector, basis_state, tensor

QFT_MATRIX_CAP = 12   # dense 2^n x 2^n transform matrix cap


@dataclass(frozen=True)
class FourierSpec:
    """Transform parameters for an n-qubit register: the primitive root of
    unity omega = e^(2 pi i / N) with N = 2^n."""

    n_qubits: int
    omega: complex = 0j

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DomainError(f"need at least one qubit, got {self.n_qubits}")
        omega = cmath.exp(2j * math.pi / self.dim) if self.omega == 0 else self.omega
        if abs(omega**self.dim - 1.0) >= 1e-9:
            raise DomainError(f"omega = {omega} is not a {self.dim}-th root of unity")
        object.__setattr__(self, "omega", omega)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def classical_dft(x) -> np.ndarray:
    """Reference transform on a plain sample vector (O(N^2) by design)."""
    samples = np.asarray(x, dtype=complex)
    if samples.size == 0:
        raise DomainError("empty sample vector")
    n = samples.size
    j = np.arange(n)
    phases = np.exp(2j * np.pi * np.outer(j, j) / n)
    return (phases @ samples) / np.sqrt(n)


@lru_cache(maxsize=None)
def qft_gate(n_qubits: int) -> GateMatrix:
    """The transform as a dense unitary: F_jk = omega^(jk) / sqrt(N)."""
    if n_qubits > QFT_MATRIX_CAP:
        raise ConfigError(f"transform matrix cap is {QFT_MATRIX_CAP} qubits")
    spec = FourierSpec(n_qubits)
    j = np.arange(spec.dim)
    matrix = spec.omega ** np.outer(j, j) / np.sqrt(spec.dim)
    return GateMatrix(spec.dim, matrix, name=f"QFT{n_qubits}")


@lru_cache(maxsize=None)
def inverse_qft_gate(n_qubits: int) -> GateMatrix:
    gate = qft_gate(n_qubits)
    return GateMatrix(gate.dim, gate.matrix.conj().T, name=f"IQFT{n_qubits}")


def qft_circuit(n_qubits: int) -> Circuit:
    """Decomposition into SWAPs, Hadamards, and controlled phase shifts.

    Qubit order is reversed up front; the ladder then processes qubits from
    least to most significant, each preceded by the controlled phase shifts
    pi/2^(k-j) that link it to every less significant qubit.
    """
    if n_qubits > QFT_MATRIX_CAP:
        raise ConfigError(f"transform circuit cap is {QFT_MATRIX_CAP} qubits")
    steps: list[tuple[GateMatrix, tuple[int, ...]]] = []
    swap = standard_gate("SWAP")
    for i in range(n_qubits // 2):
        steps.append((swap, (i, n_qubits - 1 - i)))
    for j in range(n_qubits - 1, -1, -1):
        for k in range(n_qubits - 1, j, -1):
            phase_gate = controlled(standard_gate("R", phase=math.pi / 2 ** (k - j)))
            steps.append((phase_gate, (k, j)))
        steps.append((standard_gate("H"), (j,)))
    return Circuit(n_qubits, steps)


@dataclass(frozen=True)
class PhaseEstimate:
    n_control: int
    measured_register: int
    theta_estimate: float
    success_probability: float
    delta: float


def _eigenphase(u: GateMatrix, eigenvector: StateVector) -> float:
    """Phase theta in [0, 1) of the eigenvalue <v|U|v>; rejects non-eigenvectors."""
    v = eigenvector.amps
    image = u.matrix @ v
    lam = complex(np.vdot(v, image))
    residual = float(np.linalg.norm(image - lam * v))
    if residual > 1e-6:
        raise DomainError(
            f"state is not an eigenvector of the unitary (residual {residual:.2e})"
        )
    return (cmath.phase(lam) / (2 * math.pi)) % 1.0


def control_distribution(
    u: GateMatrix, eigenvector: StateVector, n_control: int
) -> np.ndarray:
    """Analytic measurement distribution of the control register.

    Runs the full circuit: Hadamards on the controls, controlled U^(2^j)
    built by repeated squaring, then the inverse transform on the controls.
    """
    if n_control < 1:
        raise DomainError("need at least one control qubit")
    m = eigenvector.n_qubits
    state = tensor(basis_state(n_control, 0), eigenvector)
    h = standard_gate("H")
    for q in range(n_control):
        state = apply(h, [q], state)
    power = u
    for j in range(n_control):
        ctrl = n_control - 1 - j          # least significant control gets U^(2^0)
        gate = controlled(power)
        state = apply(gate, [ctrl] + list(range(n_control, n_control + m)), state)
        if j < n_control - 1:
            power = GateMatrix(power.dim, power.matrix @ power.matrix)
    state = apply(inverse_qft_gate(n_control), list(range(n_control)), state)
    probs = state.probabilities().reshape(2**n_control, 2**m).sum(axis=1)
    return probs


def phase_estimate(
    u: GateMatrix, eigenvector: StateVector, n_control: int, rng: RngStream
) -> PhaseEstimate:
    """Estimate the eigenphase of ``u`` on ``eigenvector`` with ``n_control``
    bits of precision.

    The measured register ``a`` gives the estimate a/2^n.  The reported
    success probability is the analytic weight of the register value nearest
    to the true phase, read from the pre-measurement state; ``delta`` is the
    rounding error theta - a*/2^n of that nearest value.
    """
    theta = _eigenphase(u, eigenvector)
    probs = control_distribution(u, eigenvector, n_control)
    dim = 2**n_control
    measured = rng.choice(probs / probs.sum())
    nearest = int(round(theta * dim)) % dim
    delta = theta - nearest / dim
    if delta > 0.5 / dim:
        delta -= 1.0
    return PhaseEstimate(
        n_control=n_control,
        measured_register=measured,
        theta_estimate=measured / dim,
        success_probability=float(probs[nearest]),
        delta=delta,
    )


def rounding_success_probability(delta: float, n_control: int) -> float:
    """Closed-form probability of measuring the nearest register value when
    the true phase misses it by ``delta``; equals 1 in the delta -> 0 limit.
    """
    dim = 2**n_control
    if abs(dim * delta) > 0.5 + 1e-12:
        raise DomainError(f"|2^n * delta| = {abs(dim * delta)} exceeds 1/2")
    if delta == 0.0:
        return 1.0
    numerator = abs(1 - cmath.exp(2j * math.pi * dim * delta)) ** 2
    denominator = abs(1 - cmath.exp(2j * math.pi * delta)) ** 2
    return numerator / denominator / dim**2
