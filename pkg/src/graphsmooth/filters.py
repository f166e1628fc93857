"""Low-pass graph convolution filters and their high-pass complements.

All filters expose a DescendingValue spectral decomposition whose first
column h_1 is the designated low-frequency direction, with eigenvalues in
(-1, 1] (up to 1e-9) and top eigenvalue 1. The random-walk filter is not
symmetric; it is stored together with the diagonal conjugation
(D^{1/2}, D^{-1/2}) that maps it to the symmetric filter, and every energy
diagnostic for it is computed in those conjugated coordinates (where ReLU
commutes with the positive diagonal scaling, so conjugated trajectories
are genuine symmetric-filter trajectories).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaOutOfRange,
    AmbiguousLowFrequency,
    IsolatedNode,
    NonSymmetricFilter,
    NotConnected,
)
from .graphs import Graph, degrees, is_connected, normalized_laplacian
from .spectral import Ordering, SpectralDecomposition, eigendecompose

#: accepted eigenvalue range is (-1 - EIG_RANGE_TOL, 1 + EIG_RANGE_TOL]
EIG_RANGE_TOL = 1e-9
#: top eigenvalue must be within this of 1
TOP_EIG_TOL = 1e-9
#: |mu_1 - mu_2| below this means h_1 cannot be designated
DEGENERACY_TOL = 1e-9
#: h_1 entries must be >= -H1_TOL after the sign convention
H1_TOL = 1e-10


@dataclass(frozen=True)
class Filter:
    """A graph filter with designated low-frequency eigenvector.

    `decomposition` is descending, so eigenvalues[0] = 1 and
    eigenvectors[:, 0] = h_1. `coordinate_transform`, when present, is
    the pair of diagonal vectors (q, q_inv) with
    diag(q) matrix diag(q_inv) symmetric; energies are then computed on
    diag(q) @ F. `boundary` flags a -1 eigenvalue sitting exactly on the
    open end of the admissible range.
    """

    kind: str
    matrix: np.ndarray
    decomposition: SpectralDecomposition
    mu_high: float
    coordinate_transform: tuple[np.ndarray, np.ndarray] | None = None
    boundary: bool = False

    @property
    def num_nodes(self) -> int:
        return self.matrix.shape[0]

    @property
    def h1(self) -> np.ndarray:
        return self.decomposition.eigenvectors[:, 0]

    @property
    def conjugated(self) -> bool:
        return self.coordinate_transform is not None

    def to_energy_coordinates(self, f) -> np.ndarray:
        """Map a signal into the coordinates where the filter is
        symmetric (identity for symmetric filters)."""
        arr = np.asarray(f, dtype=float)
        if self.coordinate_transform is None:
            return arr
        q = self.coordinate_transform[0]
        return q[:, None] * arr if arr.ndim == 2 else q * arr


def _validate_spectrum(kind: str, dec: SpectralDecomposition, check_degeneracy: bool):
    lam = dec.eigenvalues
    if lam[0] > 1.0 + EIG_RANGE_TOL or lam[-1] <= -1.0 - EIG_RANGE_TOL:
        raise ValueError(
            f"{kind} filter eigenvalues outside (-1, 1]: [{lam[-1]:g}, {lam[0]:g}]"
        )
    if abs(lam[0] - 1.0) > TOP_EIG_TOL:
        raise ValueError(f"{kind} filter top eigenvalue {lam[0]:g} is not 1")
    if check_degeneracy and lam.shape[0] > 1 and abs(lam[0] - lam[1]) <= DEGENERACY_TOL:
        raise AmbiguousLowFrequency(
            f"{kind} filter top eigenvalue degenerate: mu_1={lam[0]:g}, mu_2={lam[1]:g}"
        )
    h1 = dec.eigenvectors[:, 0]
    if np.any(h1 < -H1_TOL):
        raise ValueError(f"{kind} filter h_1 has negative entries")
    boundary = bool(lam.shape[0] > 1 and abs(lam[-1] + 1.0) <= EIG_RANGE_TOL)
    mu_high = float(np.max(np.abs(lam[1:]))) if lam.shape[0] > 1 else 0.0
    return mu_high, boundary


def _residual_check(kind: str, matrix: np.ndarray, vector: np.ndarray, value: float):
    res = float(np.linalg.norm(matrix @ vector - value * vector))
    if res > 1e-8 * (1.0 + abs(value)):
        raise ValueError(f"{kind} predicted top eigenpair residual {res:g} too large")


def build_filter_gcn(g: Graph) -> Filter:
    """H = (D + I)^{-1/2} (A + I) (D + I)^{-1/2}.

    Requires a connected graph; top eigenpair is
    (1, (D + I)^{1/2} 1 / ||.||), verified by residual.
    """
    if not is_connected(g):
        raise NotConnected("gcn filter requires a connected graph")
    d_plus = degrees(g) + 1.0
    scale = 1.0 / np.sqrt(d_plus)
    h = scale[:, None] * (g.adjacency + np.eye(g.num_nodes)) * scale[None, :]
    dec = eigendecompose(h, Ordering.DESCENDING)
    mu_high, boundary = _validate_spectrum("gcn", dec, check_degeneracy=True)
    predicted = np.sqrt(d_plus)
    _residual_check("gcn", h, predicted / np.linalg.norm(predicted), 1.0)
    return Filter(kind="gcn", matrix=h, decomposition=dec, mu_high=mu_high,
                  boundary=boundary)


def build_filter_sym(g: Graph, alpha: float) -> Filter:
    """H = I - alpha L_norm for alpha in (0, 1].

    Top eigenpair is (1, D^{1/2} 1 / ||.||). A -1 eigenvalue (bipartite
    graph at alpha = 1) is accepted and flagged `boundary`.
    """
    if not 0.0 < alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha}")
    h = np.eye(g.num_nodes) - alpha * normalized_laplacian(g)
    dec = eigendecompose(h, Ordering.DESCENDING)
    mu_high, boundary = _validate_spectrum("sym", dec, check_degeneracy=True)
    predicted = np.sqrt(degrees(g))
    _residual_check("sym", h, predicted / np.linalg.norm(predicted), 1.0)
    return Filter(kind="sym", matrix=h, decomposition=dec, mu_high=mu_high,
                  boundary=boundary)


def build_filter_rw(g: Graph, alpha: float) -> Filter:
    """H = I - alpha D^{-1} L (random walk; not symmetric).

    The stored decomposition is that of the conjugate
    D^{1/2} H D^{-1/2} = I - alpha L_norm, and coordinate_transform =
    (D^{1/2}, D^{-1/2}). H 1 = 1 is verified directly on H.
    """
    if not 0.0 < alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha}")
    d = degrees(g)
    if np.any(d == 0):
        raise IsolatedNode("rw filter requires positive degrees")
    sym = build_filter_sym(g, alpha)
    h = (1.0 - alpha) * np.eye(g.num_nodes) + alpha * (g.adjacency / d[:, None])
    ones = np.ones(g.num_nodes)
    if float(np.max(np.abs(h @ ones - ones))) > 1e-10:
        raise ValueError("rw filter does not fix the constant vector")
    return Filter(
        kind="rw",
        matrix=h,
        decomposition=sym.decomposition,
        mu_high=sym.mu_high,
        coordinate_transform=(np.sqrt(d), 1.0 / np.sqrt(d)),
        boundary=sym.boundary,
    )


def build_filter_surgery(base: Filter, a: float) -> Filter:
    """Spectral surgery on a base filter: keep h_1 at eigenvalue 1 and
    set every other eigenvalue to `a`:

        H_a = h_1 h_1^T + a (I - h_1 h_1^T)

    over the base filter's eigenbasis. h_1 is designated by construction
    (inherited from the base), so a = 1 (the identity filter, fully
    degenerate spectrum) is admissible. Requires |a| <= 1 and a
    symmetric base.
    """
    if abs(a) > 1.0:
        raise ValueError(f"surgery eigenvalue a must satisfy |a| <= 1, got {a}")
    if base.conjugated:
        raise NonSymmetricFilter("surgery requires a symmetric base filter")
    vectors = base.decomposition.eigenvectors
    lam = np.full(base.num_nodes, float(a))
    lam[0] = 1.0
    h = (vectors * lam[None, :]) @ vectors.T
    dec = SpectralDecomposition(
        eigenvalues=lam, eigenvectors=vectors, ordering=Ordering.DESCENDING
    )
    lam.setflags(write=False)
    return Filter(kind="surgery", matrix=h, decomposition=dec,
                  mu_high=abs(float(a)), boundary=bool(a == -1.0))


@dataclass(frozen=True)
class HighPass:
    """High-pass complement of a filter: sum_{i >= 2} |mu_i| h_i h_i^T.

    Positive semidefinite with h_1 in its kernel. `decomposition` is
    ascending (a Laplacian-style operator for the smoothness machinery);
    `conjugated` marks spectra taken in the base filter's conjugated
    coordinates (random-walk case).
    """

    matrix: np.ndarray
    decomposition: SpectralDecomposition
    conjugated: bool = False


def high_pass(filt: Filter) -> HighPass:
    """Build the high-pass operator from a filter's spectrum; for the
    random-walk filter this happens in conjugated coordinates and the
    result is flagged."""
    base = filt.decomposition
    lam = np.abs(base.eigenvalues).copy()
    lam[0] = 0.0
    order = np.argsort(lam, kind="stable")
    lam_asc = lam[order]
    vec_asc = base.eigenvectors[:, order]
    matrix = (vec_asc * lam_asc[None, :]) @ vec_asc.T
    lam_asc.setflags(write=False)
    dec = SpectralDecomposition(
        eigenvalues=lam_asc, eigenvectors=vec_asc, ordering=Ordering.ASCENDING
    )
    return HighPass(matrix=matrix, decomposition=dec, conjugated=filt.conjugated)
