"""Dense undirected weighted graphs and their Laplacian operators.

A graph is held as a dense nonnegative symmetric adjacency matrix with a
zero diagonal. Symmetry is enforced exactly (bitwise), not up to a
tolerance: generators are required to emit symmetric matrices, and silent
symmetrization would hide generator bugs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricInput,
    IsolatedNode,
    NegativeWeight,
    NonzeroDiagonal,
    TooSmall,
)


@dataclass(frozen=True)
class Graph:
    """Validated graph: `adjacency` is dense, symmetric, nonnegative,
    zero-diagonal and read-only; `num_nodes` >= 2."""

    num_nodes: int
    adjacency: np.ndarray


def build_graph(adjacency) -> Graph:
    """Validate an adjacency matrix and wrap it in a Graph.

    Raises TooSmall, AsymmetricInput, NegativeWeight or NonzeroDiagonal.
    """
    a = np.array(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise AsymmetricInput(f"adjacency must be square, got shape {a.shape}")
    n = a.shape[0]
    if n < 2:
        raise TooSmall(f"need at least 2 nodes, got {n}")
    if not np.array_equal(a, a.T):
        gap = float(np.max(np.abs(a - a.T)))
        raise AsymmetricInput(f"adjacency not symmetric, max |A - A^T| = {gap:g}")
    if np.any(a < 0):
        raise NegativeWeight("adjacency has negative entries")
    if np.any(np.diag(a) != 0):
        raise NonzeroDiagonal("adjacency has nonzero diagonal entries")
    a.setflags(write=False)
    return Graph(num_nodes=n, adjacency=a)


def degrees(g: Graph) -> np.ndarray:
    """Weighted degree vector d_i = sum_j A_ij."""
    return g.adjacency.sum(axis=1)


def combinatorial_laplacian(g: Graph) -> np.ndarray:
    """L = D - A. Symmetric positive semidefinite; L 1 = 0."""
    return np.diag(degrees(g)) - g.adjacency


def normalized_laplacian(g: Graph) -> np.ndarray:
    """L_norm = I - D^{-1/2} A D^{-1/2}.

    Raises IsolatedNode if any degree is zero.
    """
    d = degrees(g)
    if np.any(d == 0):
        bad = int(np.argmax(d == 0))
        raise IsolatedNode(f"node {bad} has zero degree")
    dinv = 1.0 / np.sqrt(d)
    return np.eye(g.num_nodes) - dinv[:, None] * g.adjacency * dinv[None, :]


def is_connected(g: Graph) -> bool:
    """Breadth-first search from node 0 over edges with positive weight."""
    n = g.num_nodes
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.nonzero(g.adjacency[i] > 0)[0]:
            if not seen[j]:
                seen[j] = True
                queue.append(int(j))
    return bool(seen.all())


def load_edge_list(path, num_nodes: int | None = None) -> Graph:
    """Load a graph from a plain-text edge list.

    One `i j w` triple per line (0-based node indices, float weight);
    blank lines and lines starting with '#' are skipped. Each triple sets
    A_ij = A_ji = w. The node count is max index + 1 unless given.
    """
    triples = []
    max_idx = -1
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"expected 'i j w' triple, got: {line!r}")
        i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        if i < 0 or j < 0:
            raise ValueError(f"negative node index in line: {line!r}")
        triples.append((i, j, w))
        max_idx = max(max_idx, i, j)
    n = num_nodes if num_nodes is not None else max_idx + 1
    a = np.zeros((n, n))
    for i, j, w in triples:
        a[i, j] = w
        a[j, i] = w
    return build_graph(a)


def load_adjacency_csv(path) -> Graph:
    """Load a dense adjacency matrix from a comma-separated file."""
    a = np.loadtxt(path, delimiter=",", ndmin=2)
    return build_graph(a)


def load_graph(path) -> Graph:
    """Dispatch on extension: '.csv' loads a dense adjacency matrix,
    anything else is parsed as an edge list."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return load_adjacency_csv(p)
    return load_edge_list(p)
