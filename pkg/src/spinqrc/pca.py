"""Local covariance dimension of the sampled state trajectory.

The trajectory is embedded as real vectors (real and imaginary parts of the
vectorized density matrices).  Around randomly chosen anchors, the sample
covariance of the cluster of nearest neighbours is eigendecomposed and the
eigenvalues above a fixed threshold counted; the dimension estimate is the
count averaged over anchors.  The nonzero covariance spectrum is computed
from the (d+1) x (d+1) Gram matrix of the centered cluster, which matches
the covariance spectrum exactly while staying small.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PcaConfig:
    d: int = 32              # cluster size minus one
    epsilon: float = 1e-6    # eigenvalue threshold
    iterations: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError("neighbourhood size d must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError("eigenvalue threshold must be positive")
        if self.iterations < 1:
            raise ConfigError("need at least one iteration")


def embed_states(states: np.ndarray) -> np.ndarray:
    """Stack real and imaginary parts of each state into one real vector."""
    states = np.asarray(states)
    t = states.shape[0]
    flat = states.reshape(t, -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def covariance_dimension(points: np.ndarray, cfg: PcaConfig, washout: int = 0) -> float:
    """Mean count of local covariance eigenvalues above cfg.epsilon.

    `points` is (T, dim); anchors and neighbours are restricted to indices
    at or beyond `washout`.  Identical points yield 0 with a warning.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ConfigError("trajectory must be a 2-D array of points")
    if washout < 0 or points.shape[0] - washout < cfg.d + 2:
        raise ConfigError(
            f"trajectory length {points.shape[0]} too short for washout {washout} "
            f"and cluster size {cfg.d + 1}")
    valid = points[washout:]
    if np.all(valid == valid[0]):
        warnings.warn("degenerate trajectory: all points identical", stacklevel=2)
        return 0.0

    rng = np.random.default_rng(cfg.seed)
    norms = np.einsum("ij,ij->i", valid, valid)
    counts = np.empty(cfg.iterations)
    for it in range(cfg.iterations):
        anchor = rng.integers(0, valid.shape[0])
        dist2 = norms + norms[anchor] - 2.0 * (valid @ valid[anchor])
        cluster_idx = np.argpartition(dist2, cfg.d)[: cfg.d + 1]
        cluster = valid[cluster_idx]
        centered = cluster - cluster.mean(axis=0)
        gram = (centered @ centered.T) / cfg.d  # N_d - 1 = d
        evals = np.linalg.eigvalsh(gram)
        counts[it] = int(np.sum(evals > cfg.epsilon))
    return float(counts.mean())
