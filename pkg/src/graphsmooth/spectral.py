"""Symmetric eigendecompositions, the graph Fourier transform, bandlimited
projections, and frequency-energy functionals.

Conventions. Eigenvectors are the columns of `eigenvectors`; each column
is sign-fixed so its entry of largest absolute value is positive (ties
broken by lowest index). Laplacian-style operators are ordered by
ascending eigenvalue (lambda_1 <= ... <= lambda_N), filters by descending
eigenvalue; the vector at index 1 (first column) is the designated
low-frequency direction in both cases. Indices in the public API
(`project_pw` n, `direction_energy` i) are 1-based to match the
eigenvalue numbering used throughout the docstrings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    IndexOutOfRange,
    NegativeEigenvalue,
    NotConnected,
    NotSymmetric,
)

#: absolute symmetry slack relative to the largest entry of the operator
SYMMETRY_RTOL = 1e-12
#: orthonormality tolerance for the eigenvector matrix
ORTHONORMALITY_TOL = 1e-10
#: eigenpair residual tolerance: ||S v - lambda v|| <= RESIDUAL_TOL (1 + |lambda|)
RESIDUAL_TOL = 1e-8
#: eigenvalues within this of zero are treated as exact zeros by decompose_psd
ZERO_EIGENVALUE_TOL = 1e-10


class Ordering(enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and orthonormal eigenvectors of a symmetric operator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    ordering: Ordering

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def gap_ratio_M(self) -> float:
        """max_{n=3..N} sqrt(lambda_n / lambda_{n-1}) for ascending order.

        NaN for N = 2 (empty max). Raises NotConnected if some
        lambda_{n-1} <= 1e-12 for n >= 3 (a disconnected spectrum) and
        ValueError for descending-ordered decompositions, where the ratio
        is undefined.
        """
        if self.ordering is not Ordering.ASCENDING:
            raise ValueError("gap_ratio_M is defined for ascending order only")
        lam = self.eigenvalues
        if lam.shape[0] < 3:
            return math.nan
        prev = lam[1:-1]
        if np.any(prev <= 1e-12):
            raise NotConnected("lambda_2 is numerically zero; graph disconnected")
        return float(np.sqrt(np.max(lam[2:] / prev)))


def _sign_fix(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-|entry| component is positive,
    ties broken by lowest row index (argmax picks the first)."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs[None, :]


def eigendecompose(operator, ordering: Ordering = Ordering.ASCENDING) -> SpectralDecomposition:
    """Full symmetric eigendecomposition with validated accuracy.

    The operator must be symmetric up to 1e-12 relative to its largest
    entry (NotSymmetric otherwise); it is symmetrized exactly before the
    solve. Orthonormality (1e-10) and the per-pair residual
    ||S v - lambda v|| <= 1e-8 (1 + |lambda|) are enforced, raising
    ConvergenceFailure on failure.
    """
    s = np.asarray(operator, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {s.shape}")
    scale = float(np.max(np.abs(s))) if s.size else 0.0
    gap = float(np.max(np.abs(s - s.T))) if s.size else 0.0
    if gap > SYMMETRY_RTOL * max(scale, 1.0):
        raise NotSymmetric(f"max |S - S^T| = {gap:g} exceeds tolerance")
    sym = 0.5 * (s + s.T)
    try:
        lam, vec = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver failed: {exc}") from exc
    if ordering is Ordering.DESCENDING:
        lam = lam[::-1].copy()
        vec = vec[:, ::-1].copy()
    vec = _sign_fix(vec)
    n = lam.shape[0]
    ortho = float(np.max(np.abs(vec.T @ vec - np.eye(n))))
    if ortho > ORTHONORMALITY_TOL:
        raise ConvergenceFailure(f"eigenvectors not orthonormal: {ortho:g}")
    residual = np.linalg.norm(sym @ vec - vec * lam[None, :], axis=0)
    bad = residual > RESIDUAL_TOL * (1.0 + np.abs(lam))
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ConvergenceFailure(
            f"eigenpair {j} residual {residual[j]:g} exceeds tolerance"
        )
    lam.setflags(write=False)
    vec.setflags(write=False)
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=vec, ordering=ordering)


def decompose_psd(operator) -> SpectralDecomposition:
    """Ascending decomposition of a positive semidefinite operator.

    Eigenvalues below -1e-10 raise NegativeEigenvalue; eigenvalues within
    1e-10 of zero are clamped to exactly 0 (so a connected Laplacian gets
    lambda_1 = 0 exactly).
    """
    dec = eigendecompose(operator, Ordering.ASCENDING)
    lam = dec.eigenvalues.copy()
    if np.any(lam < -ZERO_EIGENVALUE_TOL):
        raise NegativeEigenvalue(
            f"smallest eigenvalue {lam.min():g} below -{ZERO_EIGENVALUE_TOL:g}"
        )
    lam[np.abs(lam) <= ZERO_EIGENVALUE_TOL] = 0.0
    lam.setflags(write=False)
    return SpectralDecomposition(
        eigenvalues=lam, eigenvectors=dec.eigenvectors, ordering=dec.ordering
    )


def _check_signal(d: SpectralDecomposition, f) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[0] != d.size:
        raise DimensionMismatch(f"signal length {f.shape[0]} != {d.size}")
    if not np.all(np.isfinite(f.real)) or (
        np.iscomplexobj(f) and not np.all(np.isfinite(f.imag))
    ):
        raise ValueError("signal has non-finite entries")
    return f


def gft(d: SpectralDecomposition, f) -> np.ndarray:
    """Graph Fourier transform: coefficient vector U^* f."""
    return d.eigenvectors.T @ _check_signal(d, f)


def igft(d: SpectralDecomposition, coeffs) -> np.ndarray:
    """Inverse transform: U coeffs."""
    return d.eigenvectors @ _check_signal(d, coeffs)


def project_pw(d: SpectralDecomposition, n: int, f) -> np.ndarray:
    """Orthogonal projection onto the span of the first n eigenvectors
    (the bandlimited space of the n lowest frequencies for ascending
    order). 1 <= n <= N."""
    if d.ordering is not Ordering.ASCENDING:
        raise ValueError("project_pw expects an ascending decomposition")
    if not 1 <= n <= d.size:
        raise IndexOutOfRange(f"n = {n} outside 1..{d.size}")
    u = d.eigenvectors[:, :n]
    return u @ (u.T @ _check_signal(d, f))


def best_approx_error(d: SpectralDecomposition, n: int, f) -> float:
    """E_n(f) = || f - P_n f ||_2 = sqrt(sum_{j > n} |fhat_j|^2)."""
    if d.ordering is not Ordering.ASCENDING:
        raise ValueError("best_approx_error expects an ascending decomposition")
    if not 1 <= n <= d.size:
        raise IndexOutOfRange(f"n = {n} outside 1..{d.size}")
    coeffs = gft(d, f)
    return float(np.linalg.norm(coeffs[n:]))


def _as_channels(d: SpectralDecomposition, f) -> np.ndarray:
    f = _check_signal(d, f)
    if f.ndim == 1:
        return f[:, None]
    if f.ndim != 2:
        raise DimensionMismatch(f"signal must be 1-D or 2-D, got ndim={f.ndim}")
    return f


def high_freq_energy(d: SpectralDecomposition, f) -> float:
    """Energy off the designated index-1 direction h_1 (first column):

        E_h(F) = || F - h_1 (h_1^* F) ||_F^2

    i.e. the squared norm of F deflated by its h_1 component. Deflating
    first (rather than subtracting ||h_1^* F||^2 from ||F||_F^2) keeps
    relative precision when E_h is many orders below the total energy,
    which deep filter iterations reach quickly. Accepts a single signal
    or an (N, m) multichannel matrix.
    """
    mat = _as_channels(d, f)
    h1 = d.eigenvectors[:, 0]
    rest = mat - np.outer(h1, h1 @ mat)
    return float(np.sum(np.abs(rest) ** 2))


def direction_energy(d: SpectralDecomposition, i: int, f) -> float:
    """E_i(F) = sum_j |<f_j, h_i>|^2 for the 1-based direction index i."""
    if not 1 <= i <= d.size:
        raise IndexOutOfRange(f"i = {i} outside 1..{d.size}")
    mat = _as_channels(d, f)
    return float(np.sum(np.abs(d.eigenvectors[:, i - 1] @ mat) ** 2))


def direction_energies(d: SpectralDecomposition, f) -> np.ndarray:
    """All N direction energies at once (index i at position i-1)."""
    mat = _as_channels(d, f)
    return np.sum(np.abs(d.eigenvectors.T @ mat) ** 2, axis=1)


def dump_csv(d: SpectralDecomposition, path) -> None:
    """Debug dump: first line the eigenvalues (in decomposition order),
    then the eigenvector matrix row by row; columns follow the ordering
    tag."""
    with open(path, "w") as fh:
        fh.write(f"# ordering={d.ordering.value}\n")
        fh.write(",".join(repr(x) for x in d.eigenvalues.tolist()) + "\n")
        for row in d.eigenvectors:
            fh.write(",".join(repr(x) for x in row.tolist()) + "\n")
