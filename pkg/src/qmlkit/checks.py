"""Built-in known-value checks, runnable as one batch from the CLI.

Each check replays a worked numeric example against its frozen expected
value at a fixed tolerance and reports one pass/fail line.  The batch is the
quick end-to-end confidence run for an installed copy of the toolkit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import density, fourier, gates, grover, minimizer, state, subroutines
from .rng import RngStream


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _scalar(name: str, got: float, expected: float, tol: float) -> CheckResult:
    err = abs(got - expected)
    return CheckResult(
        name=name,
        passed=bool(err <= tol),
        detail=f"expected {expected!r}, got {got!r} (|err| = {err:.3e}, tol {tol:g})",
    )


def _example_state() -> state.StateVector:
    return state.StateVector(1, np.array([0.5j, math.sqrt(3) / 2]))


def _example_observable() -> state.Observable:
    return state.Observable(2, np.diag([1.0, 2.0]))


def check_expectation_two_level() -> CheckResult:
    got = state.expectation(_example_observable(), _example_state())
    return _scalar("expectation-two-level-example", got, 1.75, 1e-12)


def check_variance_two_level() -> CheckResult:
    got = state.variance(_example_observable(), _example_state())
    return _scalar("variance-two-level-example", got, 0.1875, 1e-12)


def check_mixed_trace_expectation() -> CheckResult:
    uniform = state.StateVector(1, np.array([1.0, 1.0]) / math.sqrt(2))
    rho = density.mixed_density([(0.25, _example_state()), (0.75, uniform)])
    got = density.trace_expectation(rho, _example_observable())
    return _scalar("mixed-state-trace-expectation", got, 1.5625, 1e-12)


def check_pure_density_literal() -> CheckResult:
    rho = density.pure_density(_example_state())
    expected = np.array(
        [[0.25, 0.25j * math.sqrt(3)], [-0.25j * math.sqrt(3), 0.75]]
    )
    err = float(np.max(np.abs(rho.matrix - expected)))
    return CheckResult(
        "pure-density-literal", err <= 1e-12, f"max entry error {err:.3e} (tol 1e-12)"
    )


def check_grover_two_qubit() -> CheckResult:
    oracle = grover.SignOracle(2, lambda x: x == 2, marked_count_hint=1)
    result = grover.grover_search(oracle, RngStream(0), iterations=1)
    amp_err = float(np.max(np.abs(result.final_state.amps - np.array([0, 0, 1, 0]))))
    always_marked = all(
        grover.grover_search(oracle, r, iterations=1).measured_index == 2
        for r in RngStream(1).split(20)
    )
    return CheckResult(
        "grover-2-qubit-single-round",
        amp_err <= 1e-12 and always_marked and abs(result.success_probability - 1.0) <= 1e-9,
        f"final amplitude error {amp_err:.3e}; measurement always lands on the marked index",
    )


def check_grover_three_qubit() -> CheckResult:
    oracle = grover.SignOracle(3, lambda x: x == 1, marked_count_hint=1)
    result = grover.grover_search(oracle, RngStream(0), iterations=2)
    magnitude = float(abs(result.final_state.amps[1]))
    expected = 11 * math.sqrt(2) / 16
    mag_ok = abs(magnitude - expected) <= 1e-12
    prob_ok = abs(result.success_probability - 0.9453125) <= 1e-9
    return CheckResult(
        "grover-3-qubit-two-rounds",
        mag_ok and prob_ok,
        f"marked magnitude {magnitude!r} vs 11*sqrt(2)/16; "
        f"success {result.success_probability!r} vs 0.9453125",
    )


def check_minimization_demo_round() -> CheckResult:
    # Second threshold round of the 3-bit minimization demo: only the global
    # minimum stays marked and two rounds push its probability to 0.972^2.
    objective = minimizer.ObjectiveFn(3, lambda x: {4: 0.0, 0: 1.0, 1: 2.0}.get(x, 3.0))
    oracle = minimizer.threshold_oracle(objective, 1.0)
    result = grover.grover_search(oracle, RngStream(0), iterations=2)
    amp = float(result.final_state.amps[4].real)
    prob = result.success_probability
    return CheckResult(
        "minimization-demo-threshold-round",
        abs(amp - 0.9722718241315029) <= 1e-9 and abs(prob - 0.9453125) <= 1e-9,
        f"minimum amplitude {amp!r} (0.972 expected), probability {prob!r} (0.945 expected)",
    )


def check_qft_two_qubit_literal() -> CheckResult:
    literal = 0.5 * np.array(
        [[1, 1, 1, 1], [1, 1j, -1, -1j], [1, -1, 1, -1], [1, -1j, -1, 1j]]
    )
    err = float(np.max(np.abs(fourier.qft_gate(2).matrix - literal)))
    return CheckResult(
        "qft-2-qubit-matrix-literal", err <= 1e-12, f"max entry error {err:.3e} (tol 1e-12)"
    )


def check_qft_circuit_decomposition() -> CheckResult:
    err = float(
        np.max(np.abs(fourier.qft_circuit(2).matrix() - fourier.qft_gate(2).matrix))
    )
    return CheckResult(
        "qft-2-qubit-circuit-decomposition", err <= 1e-12, f"max entry error {err:.3e}"
    )


def check_hadamard_swap_circuit() -> CheckResult:
    circuit = gates.Circuit(
        2, [(gates.standard_gate("H"), (0,)), (gates.standard_gate("SWAP"), (0, 1))]
    )
    out = gates.run_circuit(circuit, state.basis_state(2, 0))
    expected = np.array([1, 1, 0, 0]) / math.sqrt(2)
    err = float(np.max(np.abs(out.amps - expected)))
    return CheckResult(
        "hadamard-then-swap-circuit", err <= 1e-12, f"max amplitude error {err:.3e}"
    )


def check_swap_test_extremes() -> CheckResult:
    psi = state.basis_state(1, 0)
    phi = state.basis_state(1, 1)
    same = subroutines.swap_test(psi, psi).exact_p0
    orthogonal = subroutines.swap_test(psi, phi).exact_p0
    return CheckResult(
        "swap-test-identical-and-orthogonal",
        abs(same - 1.0) <= 1e-12 and abs(orthogonal - 0.5) <= 1e-12,
        f"identical states p0 = {same!r} (1 expected); orthogonal p0 = {orthogonal!r} (0.5 expected)",
    )


def check_phase_estimation_exact() -> CheckResult:
    unit = gates.standard_gate("I")
    estimate = fourier.phase_estimate(unit, state.basis_state(1, 0), 1, RngStream(0))
    return CheckResult(
        "phase-estimation-zero-phase",
        estimate.measured_register == 0
        and abs(estimate.success_probability - 1.0) <= 1e-9,
        f"register {estimate.measured_register} (0 expected), "
        f"probability {estimate.success_probability!r} (1 expected)",
    )


ALL_CHECKS: list[Callable[[], CheckResult]] = [
    check_expectation_two_level,
    check_variance_two_level,
    check_mixed_trace_expectation,
    check_pure_density_literal,
    check_grover_two_qubit,
    check_grover_three_qubit,
    check_minimization_demo_round,
    check_qft_two_qubit_literal,
    check_qft_circuit_decomposition,
    check_hadamard_swap_circuit,
    check_swap_test_extremes,
    check_phase_estimation_exact,
]


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
