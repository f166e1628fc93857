"""Seeded synthetic data: stochastic block model graphs, Gaussian-mixture
node features, and Frobenius-normalized Gaussian weight matrices.

Reproducibility contract: all randomness comes from numpy's PCG64 stream
seeded with the given integer. Uniform variates are consumed in the
documented order of each generator; normal variates use the Box-Muller
transform on consecutive uniform pairs (u1, u2) drawn as rows of a
(m, 2) uniform block, with u1 mapped to 1 - u1 so the log argument is
positive:

    z_{2k}   = sqrt(-2 ln(1 - u1_k)) cos(2 pi u2_k)
    z_{2k+1} = sqrt(-2 ln(1 - u1_k)) sin(2 pi u2_k)

This scheme is frozen; changing it is a breaking change to every seeded
experiment. Trial sweeps derive per-trial seeds as base_seed + trial_index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDraw, DimensionMismatch
from .graphs import Graph, build_graph


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 seeded with `seed`."""
    return np.random.Generator(np.random.PCG64(seed))


def normal_variates(rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` standard normals via Box-Muller (see module docstring)."""
    pairs = (count + 1) // 2
    u = rng.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def balanced_labels(num_nodes: int) -> np.ndarray:
    """+1 for the first ceil(N/2) nodes, -1 for the rest."""
    labels = np.ones(num_nodes, dtype=int)
    labels[(num_nodes + 1) // 2 :] = -1
    return labels


@dataclass(frozen=True)
class SbmParams:
    """Two-block stochastic block model parameters.

    Within-class edge probability p_intra, between-class q_inter, with
    0 <= q_inter <= p_intra <= 1 (q = p admits the complete-graph edge
    case). `labels` entries must be +1/-1; defaults to balanced labels.
    """

    num_nodes: int
    p_intra: float
    q_inter: float
    seed: int
    labels: np.ndarray | None = None

    def __post_init__(self):
        if self.num_nodes < 2:
            raise DimensionMismatch(f"need at least 2 nodes, got {self.num_nodes}")
        if not (0.0 <= self.q_inter <= self.p_intra <= 1.0):
            raise ValueError(
                f"need 0 <= q <= p <= 1, got p={self.p_intra}, q={self.q_inter}"
            )
        labels = self.labels
        if labels is None:
            labels = balanced_labels(self.num_nodes)
        labels = np.asarray(labels, dtype=int)
        if labels.shape != (self.num_nodes,):
            raise DimensionMismatch(
                f"labels shape {labels.shape} != ({self.num_nodes},)"
            )
        if not np.all(np.abs(labels) == 1):
            raise ValueError("labels must be +1/-1")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)


def sample_sbm(params: SbmParams) -> Graph:
    """Draw a two-block SBM graph.

    For each unordered pair i < j (row-major order over the upper
    triangle) one uniform is drawn; the edge is present iff it falls
    below p_intra (same labels) or q_inter (different labels). Binary
    weights, deterministic in the seed.
    """
    n = params.num_nodes
    rng = make_rng(params.seed)
    iu, ju = np.triu_indices(n, k=1)
    same = params.labels[iu] == params.labels[ju]
    threshold = np.where(same, params.p_intra, params.q_inter)
    edge = rng.random(iu.size) < threshold
    a = np.zeros((n, n))
    a[iu, ju] = edge.astype(float)
    a += a.T
    return build_graph(a)


@dataclass(frozen=True)
class GmmParams:
    """Gaussian-mixture feature parameters: F = labels mu^T + noise.

    `mean_vector` mu must have length `num_channels`; noise is i.i.d.
    N(0, noise_std^2).
    """

    mean_vector: np.ndarray
    noise_std: float
    num_channels: int
    seed: int

    def __post_init__(self):
        mu = np.asarray(self.mean_vector, dtype=float)
        if mu.ndim != 1 or mu.shape[0] != self.num_channels:
            raise DimensionMismatch(
                f"mean_vector length {mu.shape} != num_channels {self.num_channels}"
            )
        if not self.noise_std > 0:
            raise ValueError(f"noise_std must be positive, got {self.noise_std}")
        mu.setflags(write=False)
        object.__setattr__(self, "mean_vector", mu)


def sample_gmm_features(labels, params: GmmParams) -> np.ndarray:
    """Feature matrix F = y mu^T + eps, eps_ij ~ N(0, sigma^2).

    Noise entries are drawn row-major (node index fastest-varying last).
    Returns an (N, num_channels) array.
    """
    y = np.asarray(labels, dtype=float)
    if y.ndim != 1:
        raise DimensionMismatch(f"labels must be a vector, got shape {y.shape}")
    n, m = y.shape[0], params.num_channels
    rng = make_rng(params.seed)
    eps = normal_variates(rng, n * m).reshape(n, m) * params.noise_std
    return np.outer(y, params.mean_vector) + eps


def sample_weight(rows: int, cols: int, target_frobenius: float, seed: int) -> np.ndarray:
    """Gaussian weight matrix rescaled to an exact Frobenius norm.

    Entries are i.i.d. N(0,1) drawn row-major, then scaled so
    ||W||_F = target_frobenius to machine precision (the scaling is
    applied twice to cancel first-order rounding). An all-zero draw is
    retried once from the continuing stream, then DegenerateDraw.
    """
    if rows < 1 or cols < 1:
        raise DimensionMismatch(f"weight shape ({rows}, {cols}) invalid")
    if not target_frobenius > 0:
        raise ValueError(f"target_frobenius must be positive, got {target_frobenius}")
    rng = make_rng(seed)
    w = normal_variates(rng, rows * cols).reshape(rows, cols)
    if not np.any(w):
        w = normal_variates(rng, rows * cols).reshape(rows, cols)
        if not np.any(w):
            raise DegenerateDraw("weight draw produced an all-zero matrix twice")
    for _ in range(2):
        w = w * (target_frobenius / np.linalg.norm(w))
    return w
