"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its pinned tolerance."""
import functools
import math
import time

import numpy as np
import pytest

from qmlkit import cli
from qmlkit.clustering import ClusterConfig, Dataset, kmeans, kmedians
from qmlkit.density import mixed_density, trace_expectation
from qmlkit.fourier import (
    classical_dft,
    control_distribution,
    phase_estimate,
    qft_circuit,
    qft_gate,
    rounding_success_probability,
)
from qmlkit.gates import GateMatrix, apply
from qmlkit.grover import SignOracle, default_iterations, grover_search
from qmlkit.minimizer import ObjectiveFn, argmin_via_search, minimize
from qmlkit.qnn import (
    QnnEncoding,
    QnnParameters,
    QnnTrainConfig,
    build_unitary,
    cost,
    finite_difference_gradient,
    forward,
    train,
)
from qmlkit.qpca import build_model, eigen_sample, extract_scores, preprocess
from qmlkit.qsvm import AlphaGrid, KernelSpec, LabeledDataset, kernel_matrix, predict, solve
from qmlkit.rng import RngStream
from qmlkit.state import Observable, StateVector, basis_state, inner_product
from qmlkit.subroutines import dist_calc, encode, swap_test

from test_clustering import reference_lloyd


def criterion(number: int, description: str):
    def decorate(test):
        @functools.wraps(test)
        def wrapper(*args, **kwargs):
            try:
                test(*args, **kwargs)
            except BaseException:
                print(f"[criterion {number:2d}] {description}: FAIL")
                raise
            print(f"[criterion {number:2d}] {description}: PASS")

        return wrapper

    return decorate


@criterion(1, "observable expectation/variance and mixed-state trace rule")
def test_observable_math():
    psi = StateVector(1, np.array([0.5j, math.sqrt(3) / 2]))
    obs = Observable(2, np.diag([1.0, 2.0]))
    from qmlkit.state import expectation, variance

    assert abs(expectation(obs, psi) - 1.75) <= 1e-12
    assert abs(variance(obs, psi) - 0.1875) <= 1e-12
    uniform = StateVector(1, np.array([1.0, 1.0]) / math.sqrt(2))
    rho = mixed_density([(0.25, psi), (0.75, uniform)])
    assert abs(trace_expectation(rho, obs) - 1.5625) <= 1e-12


@criterion(2, "search amplitudes: 2-qubit exact hit and 3-qubit two-round values")
def test_grover_worked_examples():
    two = grover_search(
        SignOracle(2, lambda x: x == 2, marked_count_hint=1), RngStream(0), iterations=1
    )
    assert np.max(np.abs(two.final_state.amps - np.array([0, 0, 1, 0]))) <= 1e-12
    for rng in RngStream(1).split(30):
        oracle = SignOracle(2, lambda x: x == 2, marked_count_hint=1)
        assert grover_search(oracle, rng, iterations=1).measured_index == 2
    three = grover_search(
        SignOracle(3, lambda x: x == 1, marked_count_hint=1), RngStream(0), iterations=2
    )
    assert abs(abs(three.final_state.amps[1]) - 11 * math.sqrt(2) / 16) <= 1e-12
    assert abs(three.success_probability - 0.9453125) <= 1e-9


@criterion(3, "search success follows the rotation law for n <= 6, all k")
def test_grover_rotation_law():
    started = time.monotonic()
    for n in range(1, 7):
        for k in range(2**n + 1):
            marked = frozenset(range(k))
            oracle = SignOracle(n, lambda x, m=marked: x in m, marked_count_hint=k)
            angle = math.asin(math.sqrt(k / 2**n))
            for rounds in range(default_iterations(n, k) + 3):
                result = grover_search(oracle, RngStream(0), iterations=rounds)
                expected = math.sin((2 * rounds + 1) * angle) ** 2
                assert abs(result.success_probability - expected) <= 1e-9
    assert time.monotonic() - started < 10.0


@criterion(4, "quantum minimization finds global minima at >= 95% rate")
def test_minimizer_success_rates():
    started = time.monotonic()
    demo = ObjectiveFn.from_table([1.0, 2.0, 3.0, 3.0, 0.0, 3.0, 3.0, 3.0])
    demo_wins = sum(
        minimize(demo, RngStream(seed)).argmin_bits == "100" for seed in range(200)
    )
    assert demo_wins >= 190
    gen = np.random.default_rng(404)
    wins = 0
    for seed in range(200):
        n_bits = int(gen.integers(3, 9))
        table = gen.permutation(2**n_bits).astype(float)
        result = minimize(ObjectiveFn.from_table(table), RngStream(70_000 + seed))
        wins += int(result.argmin_bits, 2) == int(np.argmin(table))
    assert wins >= 190
    assert time.monotonic() - started < 60.0


@criterion(5, "transform literals, circuit equivalence, and two-sine spectrum bins")
def test_fourier_transform_stack():
    literal = 0.5 * np.array(
        [[1, 1, 1, 1], [1, 1j, -1, -1j], [1, -1, 1, -1], [1, -1j, -1, 1j]]
    )
    assert np.max(np.abs(qft_gate(2).matrix - literal)) <= 1e-12
    for n in range(1, 9):
        assert np.max(np.abs(qft_circuit(n).matrix() - qft_gate(n).matrix)) <= 1e-9
    gen = np.random.default_rng(11)
    for n in range(1, 11):
        amps = gen.normal(size=2**n) + 1j * gen.normal(size=2**n)
        psi = StateVector(n, amps / np.linalg.norm(amps))
        via_gate = apply(qft_gate(n), list(range(n)), psi)
        assert np.max(np.abs(via_gate.amps - classical_dft(psi.amps))) <= 1e-9
    j = np.arange(1000)
    signal = 2 * np.sin(2 * np.pi * 10 * j / 1000) + 0.3 * np.sin(2 * np.pi * 50 * j / 1000)
    magnitudes = np.abs(classical_dft(signal))
    assert set(np.argsort(magnitudes)[-4:].tolist()) == {10, 50, 950, 990}


@criterion(6, "phase estimation: dyadic exactness, 4/pi^2 floor, shot statistics")
def test_phase_estimation():
    for n in range(1, 6):
        for a in range(2**n):
            unitary = GateMatrix(2, np.diag([1.0, np.exp(2j * np.pi * a / 2**n)]))
            estimate = phase_estimate(unitary, basis_state(1, 1), n, RngStream(a))
            assert estimate.measured_register == a
            assert abs(estimate.success_probability - 1.0) <= 1e-9
    gen = np.random.default_rng(88)
    for _ in range(100):
        n = int(gen.integers(4, 9))
        theta = float(gen.random())
        unitary = GateMatrix(2, np.diag([1.0, np.exp(2j * np.pi * theta)]))
        estimate = phase_estimate(unitary, basis_state(1, 1), n, RngStream(0))
        assert estimate.success_probability >= 4 / math.pi**2 - 1e-9
        assert abs(
            estimate.success_probability - rounding_success_probability(estimate.delta, n)
        ) <= 1e-9
    theta, n = 0.2371, 5
    unitary = GateMatrix(2, np.diag([1.0, np.exp(2j * np.pi * theta)]))
    probs = control_distribution(unitary, basis_state(1, 1), n)
    nearest = round(theta * 2**n) % 2**n
    rng = RngStream(3141)
    shots = 10_000
    hits = sum(rng.choice(probs) == nearest for _ in range(shots))
    sigma = math.sqrt(probs[nearest] * (1 - probs[nearest]) / shots)
    assert abs(hits / shots - probs[nearest]) <= 3 * sigma


@criterion(7, "swap-test overlap formula exact; shot estimator inside 3 sigma")
def test_swap_test():
    gen = np.random.default_rng(9)
    for _ in range(1000):
        n = int(gen.integers(1, 3))
        raw_a = gen.normal(size=2**n) + 1j * gen.normal(size=2**n)
        raw_b = gen.normal(size=2**n) + 1j * gen.normal(size=2**n)
        a = StateVector(n, raw_a / np.linalg.norm(raw_a))
        b = StateVector(n, raw_b / np.linalg.norm(raw_b))
        expected = 0.5 + 0.5 * abs(inner_product(a, b)) ** 2
        assert abs(swap_test(a, b).exact_p0 - expected) <= 1e-12
    misses = 0
    trials = 300
    streams = RngStream(500).split(trials)
    for trial in range(trials):
        raw_a = gen.normal(size=2)
        raw_b = gen.normal(size=2)
        a = StateVector(1, raw_a.astype(complex) / np.linalg.norm(raw_a))
        b = StateVector(1, raw_b.astype(complex) / np.linalg.norm(raw_b))
        estimate = swap_test(a, b, shots=4096, rng=streams[trial])
        sigma = math.sqrt(max(estimate.exact_p0 * (1 - estimate.exact_p0), 1e-12) / 4096)
        misses += abs(estimate.p0_hat - estimate.exact_p0) >= 3 * sigma
    assert misses <= math.ceil(0.01 * trials)


@criterion(8, "encoded distance equals host Euclidean distance up to 1024 dims")
def test_distance_calculation():
    gen = np.random.default_rng(14)
    for dim in (2, 3, 7, 16, 100, 512, 1024):
        a = gen.normal(size=dim)
        b = gen.normal(size=dim)
        estimate = dist_calc(a, b)
        assert abs(estimate.dist_sq - float(np.sum((a - b) ** 2))) <= 1e-9 * max(
            1.0, float(np.sum((a - b) ** 2))
        )
        assert encode(a).state.n_qubits == max(1, math.ceil(math.log2(dim)))


@criterion(9, "clustering: Lloyd bit-identity, row centroids, argmin accuracy")
def test_clustering():
    started = time.monotonic()
    gen = np.random.default_rng(2025)
    for trial in range(20):
        m = int(gen.integers(20, 201)) if trial < 17 else 200
        n = int(gen.integers(2, 17))
        k = int(gen.integers(2, 6))
        centers = gen.normal(size=(k, n)) * 8.0
        data = np.vstack(
            [gen.normal(size=(max(2, m // k), n)) * 0.8 + c for c in centers]
        )
        initial = data[gen.permutation(len(data))[:k]]
        model = kmeans(
            Dataset(data), ClusterConfig(k=k), RngStream(trial), initial_centroids=initial
        )
        ref_c, ref_a, ref_it, ref_conv = reference_lloyd(data, initial)
        assert np.array_equal(model.assignments, ref_a)
        assert np.array_equal(model.centroids, ref_c)
        assert (model.iterations, model.converged) == (ref_it, ref_conv)
    data = np.vstack(
        [gen.normal(size=(10, 3)), gen.normal(size=(10, 3)) + 7.0]
    )
    med = kmedians(Dataset(data), ClusterConfig(k=2), RngStream(5))
    rows = set(map(tuple, data))
    assert all(tuple(c) in rows for c in med.centroids)
    rng = RngStream(99)
    correct = 0
    for _ in range(1000):
        k = int(gen.integers(2, 9))
        values = gen.random(size=k)
        correct += argmin_via_search(values, rng) == int(np.argmin(values))
    assert correct >= 950
    assert time.monotonic() - started < 120.0


@criterion(10, "SVM grid optimum matches enumeration; residual bound; XOR 4/4")
def test_qsvm():
    from qmlkit.qsvm import _default_penalty, _penalized_table

    two_point = LabeledDataset([[-1.0], [1.0]], [-1, 1])
    four_point = LabeledDataset(
        [[-2.0, 0.0], [-1.0, -0.5], [1.0, 0.5], [2.0, 0.0]], [-1, -1, 1, 1]
    )
    xor = LabeledDataset(
        [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]], [1, 1, -1, -1]
    )
    grid = AlphaGrid(bits_per_alpha=3)
    instances = [
        (two_point, KernelSpec("linear")),
        (four_point, KernelSpec("linear")),
        (xor, KernelSpec("gaussian", gamma=2.0)),
    ]
    for data, spec in instances:
        kernel = kernel_matrix(data, spec)
        penalty = _default_penalty(kernel)
        table = _penalized_table(data, kernel, grid, penalty)
        best = float(table.min())
        for seed in range(10):
            solution = solve(data, spec, grid, RngStream(seed))
            index = sum(
                int(round(solution.alphas[i] / grid.step))
                << ((data.m - 1 - i) * grid.bits_per_alpha)
                for i in range(data.m)
            )
            assert table[index] == pytest.approx(best, abs=1e-9)
            residual = abs(float(solution.alphas @ data.labels))
            assert residual <= grid.step * data.m + 1e-12
    gaussian = KernelSpec("gaussian", gamma=2.0)
    model = solve(xor, gaussian, grid, RngStream(1))
    assert all(
        predict(model, xor, gaussian, x) == y for x, y in zip(xor.vectors, xor.labels)
    )


@criterion(11, "principal components: host oracle match, sampling, scores")
def test_qpca():
    gen = np.random.default_rng(55)
    raw = gen.normal(size=(12, 4)) @ np.diag([3.0, 1.5, 0.7, 0.2])
    prepared = preprocess(raw)
    model = build_model(prepared)
    host_cov = prepared.rows.T @ prepared.rows / prepared.rows.shape[0]
    values, vectors = np.linalg.eigh(host_cov)
    values, vectors = values[::-1], vectors[:, ::-1]
    assert np.max(np.abs(model.eigenvalues - values)) <= 1e-9
    for j in range(4):
        assert abs(abs(vectors[:, j] @ model.eigenvectors[:, j].real) - 1.0) <= 1e-9
    draws = 10_000
    samples = eigen_sample(model, draws, RngStream(808))
    resolution = 2 * math.pi / (model.t * 2**model.n_control)
    for j, lam in enumerate(model.eigenvalues):
        hits = sum(s.counts for s in samples if s.component_index == j)
        sigma = math.sqrt(max(lam * (1 - lam), 1e-12) / draws)
        assert abs(hits / draws - lam) <= 3 * sigma
        per_component = [s for s in samples if s.component_index == j]
        if per_component:
            modal = max(per_component, key=lambda s: s.counts)
            assert abs(modal.lambda_measured - lam) <= resolution + 1e-12
    scores = extract_scores(model, prepared, 4)
    assert np.max(
        np.abs(scores.scores - prepared.rows @ model.eigenvectors.real)
    ) <= 1e-9


@criterion(12, "network unitarity, phase invariance, NOT-task training, gradients")
def test_qnn():
    enc = QnnEncoding(k=1, m=1)
    gen = np.random.default_rng(23)
    for _ in range(10):
        u = build_unitary(QnnParameters(gen.normal(scale=0.5, size=64)), enc)
        assert np.max(np.abs(u @ u.conj().T - np.eye(8))) <= 1e-9
    dataset = [(0, 0, 1), (1, 0, 0)]
    for kind in ("overlap", "pauli"):
        cfg = QnnTrainConfig(cost_kind=kind)
        alphas = gen.normal(scale=0.4, size=64)
        base = cost(QnnParameters(alphas), enc, dataset, cfg)
        shifted = alphas.copy()
        shifted[0] += 2.5
        assert abs(cost(QnnParameters(shifted), enc, dataset, cfg) - base) <= 1e-9
    cfg = QnnTrainConfig(eta=0.1, epochs=120)   # converges well inside 500
    params, _ = train(enc, dataset, cfg, RngStream(0))
    for x1, x2, y in dataset:
        assert forward(params, enc, x1, x2).matrix[y, y].real >= 0.99
    probe = QnnParameters(gen.normal(scale=0.3, size=64))
    coarse = finite_difference_gradient(probe, enc, dataset, QnnTrainConfig())
    fine = finite_difference_gradient(probe, enc, dataset, QnnTrainConfig(), stencil=5)
    scale = np.maximum(np.abs(fine), 1e-6)
    assert np.max(np.abs(coarse - fine) / scale) <= 1e-4


@criterion(13, "CLI determinism: fixed seed gives byte-identical payloads")
def test_cli_determinism(tmp_path):
    import test_cli

    blob = test_cli.write(
        tmp_path / "blob.csv",
        "\n".join(
            f"{float(a)!r},{float(b)!r}"
            for a, b in np.vstack(
                [
                    np.random.default_rng(0).normal(size=(6, 2)),
                    np.random.default_rng(1).normal(size=(6, 2)) + 5.0,
                ]
            )
        ),
    )
    for argv in test_cli._all_command_invocations(tmp_path, blob):
        first = test_cli.run_ok(argv + ["--seed", "21"])
        second = test_cli.run_ok(argv + ["--seed", "21"])
        assert test_cli.canonical(first) == test_cli.canonical(second), argv


@criterion(14, "built-in known-value batch passes in under 30 seconds")
def test_paper_check_batch():
    started = time.monotonic()
    code, report = cli.run(["paper-check"])
    elapsed = time.monotonic() - started
    assert code == 0
    assert report["results"]["passed"] is True
    assert elapsed < 30.0
