"""Lloyd-style k-means and k-medians with quantum distance estimation.

Assignment distances run through the state-encoding distance subroutine
(exact or shot-estimated); the nearest-centroid choice is either a host
argmin or quantum minimum finding over the centroid indices.  Centroid
updates are plain host arithmetic: means for k-means, and the quantum
set-median for k-medians (so k-medians centroids are always dataset rows).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .minimizer import argmin_via_search
from .rng import RngStream
from .subroutines import DEFAULT_SHOTS, dist_calc, median_calc

ZERO_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    """Row-per-example matrix; rows must be nonzero to be encodable."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if v.size == 0:
            raise DomainError("empty dataset")
        norms = np.linalg.norm(v, axis=1)
        bad = np.nonzero(norms <= ZERO_NORM_TOL)[0]
        if bad.size:
            raise DomainError(f"dataset row {bad[0]} is a zero vector and cannot be encoded")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_features(self) -> int:
        return self.vectors.shape[1]


@dataclass
class ClusterConfig:
    k: int
    max_iterations: int = 100
    eta: float = 1e-4
    distance_mode: str = "exact"           # exact | shots
    shots: int = DEFAULT_SHOTS
    use_grover_argmin: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be >= 1")
        if self.eta <= 0:
            raise DomainError("eta must be > 0")
        if self.distance_mode not in ("exact", "shots"):
            raise DomainError(f"unknown distance mode {self.distance_mode!r}")


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    iterations: int
    converged: bool
    trace: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _init_centroids(data: Dataset, k: int, rng: RngStream) -> np.ndarray:
    rows = rng.gen.permutation(data.m)[:k]
    return data.vectors[np.sort(rows)].copy()


def _point_distances(
    point: np.ndarray,
    centroids: np.ndarray,
    cfg: ClusterConfig,
    rng: RngStream,
    warnings: list[str],
) -> np.ndarray:
    dists = np.empty(len(centroids))
    for j, mu in enumerate(centroids):
        if np.linalg.norm(mu) <= ZERO_NORM_TOL:
            # A mean update can produce the zero vector, which has no
            # amplitude encoding; fall back to host arithmetic for this pair.
            dists[j] = float(np.sum((point - mu) ** 2))
            warnings.append(f"centroid {j} has zero norm; host-side distance used")
        else:
            dists[j] = dist_calc(point, mu, cfg.shots, rng, cfg.distance_mode).dist_sq
    return dists


def _assign(
    data: Dataset,
    centroids: np.ndarray,
    cfg: ClusterConfig,
    rng: RngStream,
    warnings: list[str],
) -> np.ndarray:
    assignments = np.empty(data.m, dtype=int)
    for i, point in enumerate(data.vectors):
        dists = _point_distances(point, centroids, cfg, rng, warnings)
        if cfg.use_grover_argmin:
            assignments[i] = argmin_via_search(dists, rng)
        else:
            assignments[i] = int(np.argmin(dists))
    return assignments


def _repair_empty(
    data: Dataset,
    centroids: np.ndarray,
    assignments: np.ndarray,
    cfg: ClusterConfig,
    rng: RngStream,
    warnings: list[str],
) -> None:
    for j in range(cfg.k):
        if np.any(assignments == j):
            continue
        # Reseed with the point farthest from its currently assigned centroid.
        gaps = np.array(
            [
                np.sum((data.vectors[i] - centroids[assignments[i]]) ** 2)
                for i in range(data.m)
            ]
        )
        farthest = int(np.argmax(gaps))
        centroids[j] = data.vectors[farthest]
        assignments[farthest] = j
        warnings.append(f"empty cluster {j} reseeded with row {farthest}")


def _within_cluster_cost(data: Dataset, centroids: np.ndarray, assignments: np.ndarray) -> float:
    return float(
        np.sum((data.vectors - centroids[assignments]) ** 2)
    )


def kmeans(
    data: Dataset,
    cfg: ClusterConfig,
    rng: RngStream,
    initial_centroids: np.ndarray | None = None,
) -> ClusterModel:
    """Iterate nearest-centroid assignment and mean updates until every
    centroid moves less than ``cfg.eta`` or the iteration budget runs out.
    """
    if cfg.k > data.m:
        raise DomainError(f"k = {cfg.k} exceeds the {data.m} data rows")
    centroids = (
        np.array(initial_centroids, dtype=float)
        if initial_centroids is not None
        else _init_centroids(data, cfg.k, rng)
    )
    warnings: list[str] = []
    trace: list[dict] = []
    assignments = np.zeros(data.m, dtype=int)
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        assignments = _assign(data, centroids, cfg, rng, warnings)
        _repair_empty(data, centroids, assignments, cfg, rng, warnings)
        new_centroids = centroids.copy()
        for j in range(cfg.k):
            members = data.vectors[assignments == j]
            new_centroids[j] = members.mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        trace.append(
            {
                "iteration": iterations,
                "max_centroid_shift": shift,
                "within_cluster_cost": _within_cluster_cost(data, centroids, assignments),
            }
        )
        if shift < cfg.eta:
            converged = True
            break
    return ClusterModel(
        k=cfg.k,
        centroids=centroids,
        assignments=assignments,
        iterations=iterations,
        converged=converged,
        trace=trace,
        warnings=warnings,
    )


def kmedians(
    data: Dataset,
    cfg: ClusterConfig,
    rng: RngStream,
    initial_centroids: np.ndarray | None = None,
) -> ClusterModel:
    """Like k-means, but centroids are quantum set-medians of their members,
    and convergence means the centroids stopped changing exactly.
    """
    if cfg.k > data.m:
        raise DomainError(f"k = {cfg.k} exceeds the {data.m} data rows")
    centroids = (
        np.array(initial_centroids, dtype=float)
        if initial_centroids is not None
        else _init_centroids(data, cfg.k, rng)
    )
    warnings: list[str] = []
    trace: list[dict] = []
    assignments = np.zeros(data.m, dtype=int)
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        assignments = _assign(data, centroids, cfg, rng, warnings)
        _repair_empty(data, centroids, assignments, cfg, rng, warnings)
        new_centroids = centroids.copy()
        for j in range(cfg.k):
            members = data.vectors[assignments == j]
            _, median = median_calc(list(members), cfg.shots, rng, cfg.distance_mode)
            new_centroids[j] = median
        changed = not np.array_equal(new_centroids, centroids)
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        trace.append(
            {
                "iteration": iterations,
                "max_centroid_shift": shift,
                "within_cluster_cost": _within_cluster_cost(data, centroids, assignments),
            }
        )
        if not changed:
            converged = True
            break
    return ClusterModel(
        k=cfg.k,
        centroids=centroids,
        assignments=assignments,
        iterations=iterations,
        converged=converged,
        trace=trace,
        warnings=warnings,
    )
