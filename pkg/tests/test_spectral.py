"""Eigendecomposition, GFT, projections, energy functionals.

Frozen closed forms used throughout: the two-node complete graph K2 has
combinatorial Laplacian eigenvalues (0, 2) with eigenvectors
(1,1)/sqrt(2) and (1,-1)/sqrt(2) (sign-fixed); the indicator signal
f = (1, 0) has fhat = (1/sqrt(2), 1/sqrt(2)) and E_1(f) = 1/sqrt(2).
"""

import math

import numpy as np
import pytest

from graphsmooth.errors import (
    ConvergenceFailure,
    DimensionMismatch,
    IndexOutOfRange,
    NegativeEigenvalue,
    NotConnected,
    NotSymmetric,
)
from graphsmooth.graphs import build_graph, combinatorial_laplacian
from graphsmooth.spectral import (
    Ordering,
    SpectralDecomposition,
    best_approx_error,
    decompose_psd,
    direction_energies,
    direction_energy,
    dump_csv,
    eigendecompose,
    gft,
    high_freq_energy,
    igft,
    project_pw,
)
from graphsmooth.synth import make_rng, normal_variates, sample_sbm, SbmParams

SQ2 = math.sqrt(2.0)


def k2_decomposition():
    lap = combinatorial_laplacian(build_graph(np.array([[0.0, 1.0], [1.0, 0.0]])))
    return decompose_psd(lap)


def random_connected_decomposition(n, seed):
    for s in range(seed, seed + 50):
        g = sample_sbm(SbmParams(n, 0.8, 0.3, seed=s))
        lap = combinatorial_laplacian(g)
        d = decompose_psd(lap)
        if d.eigenvalues[1] > 1e-8:
            return d, lap
    raise RuntimeError("no connected draw")


def test_k2_closed_form():
    d = k2_decomposition()
    assert np.allclose(d.eigenvalues, [0.0, 2.0])
    assert d.eigenvalues[0] == 0.0  # clamped exactly
    assert np.allclose(d.eigenvectors[:, 0], [1 / SQ2, 1 / SQ2])
    assert np.allclose(d.eigenvectors[:, 1], [1 / SQ2, -1 / SQ2])


def test_identity_gets_canonical_basis():
    d = eigendecompose(np.eye(4))
    assert np.allclose(d.eigenvalues, 1.0)
    # sign fix makes the degenerate basis reproducible
    assert np.all(d.eigenvectors[np.argmax(np.abs(d.eigenvectors), axis=0), range(4)] > 0)


def test_eigendecompose_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        eigendecompose(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_eigendecompose_rejects_nonsquare():
    with pytest.raises(DimensionMismatch):
        eigendecompose(np.zeros((2, 3)))


def test_orthonormality_and_residual_on_random_laplacians():
    for seed in range(5):
        d, lap = random_connected_decomposition(20, 100 + seed)
        n = d.size
        gram = d.eigenvectors.T @ d.eigenvectors
        assert np.max(np.abs(gram - np.eye(n))) <= 1e-10
        resid = lap @ d.eigenvectors - d.eigenvectors * d.eigenvalues[None, :]
        assert np.max(np.linalg.norm(resid, axis=0)) <= 1e-8 * (1 + d.eigenvalues.max())
        assert np.all(np.diff(d.eigenvalues) >= 0)


def test_decompose_psd_rejects_negative():
    with pytest.raises(NegativeEigenvalue):
        decompose_psd(np.diag([1.0, -0.5]))


def test_ordering_descending():
    d = eigendecompose(np.diag([3.0, 1.0, 2.0]), Ordering.DESCENDING)
    assert np.allclose(d.eigenvalues, [3.0, 2.0, 1.0])


def test_gap_ratio_m():
    d = decompose_psd(np.diag([0.0, 1.0, 4.0]))
    assert abs(d.gap_ratio_M - 2.0) < 1e-12
    assert math.isnan(k2_decomposition().gap_ratio_M)
    with pytest.raises(ValueError):
        _ = eigendecompose(np.diag([3.0, 1.0, 2.0]), Ordering.DESCENDING).gap_ratio_M


def test_gap_ratio_m_disconnected():
    adj = np.zeros((4, 4))
    adj[0, 1] = adj[1, 0] = 1.0
    adj[2, 3] = adj[3, 2] = 1.0
    d = decompose_psd(combinatorial_laplacian(build_graph(adj)))
    with pytest.raises(NotConnected):
        _ = d.gap_ratio_M


def test_gft_k2_indicator():
    d = k2_decomposition()
    fhat = gft(d, np.array([1.0, 0.0]))
    assert np.allclose(fhat, [1 / SQ2, 1 / SQ2])
    assert np.allclose(igft(d, fhat), [1.0, 0.0])


def test_gft_parseval():
    d, _ = random_connected_decomposition(16, 7)
    rng = make_rng(3)
    f = normal_variates(rng, 16)
    assert abs(np.linalg.norm(gft(d, f)) - np.linalg.norm(f)) < 1e-12
    z = f + 1j * normal_variates(rng, 16)
    assert abs(np.linalg.norm(gft(d, z)) - np.linalg.norm(z)) < 1e-12


def test_project_pw_idempotent_and_orthogonal():
    d, _ = random_connected_decomposition(12, 21)
    f = normal_variates(make_rng(5), 12)
    for n in (1, 4, 12):
        p = project_pw(d, n, f)
        assert np.allclose(project_pw(d, n, p), p, atol=1e-12)
        # residual orthogonal to the projection
        assert abs(np.dot(f - p, p)) < 1e-10


def test_project_pw_index_bounds():
    d = k2_decomposition()
    with pytest.raises(IndexOutOfRange):
        project_pw(d, 0, np.ones(2))
    with pytest.raises(IndexOutOfRange):
        project_pw(d, 3, np.ones(2))


def test_best_approx_error_k2():
    d = k2_decomposition()
    assert abs(best_approx_error(d, 1, np.array([1.0, 0.0])) - 1 / SQ2) < 1e-12
    assert best_approx_error(d, 2, np.array([1.0, 0.0])) == 0.0


def test_best_approx_error_matches_lstsq_oracle():
    """E_n(f) against a least-squares distance to the span of the first
    n eigenvectors, an independent route to the same quantity."""
    d, _ = random_connected_decomposition(8, 33)
    f = normal_variates(make_rng(9), 8)
    for n in range(1, 9):
        basis = d.eigenvectors[:, :n]
        coef, *_ = np.linalg.lstsq(basis, f, rcond=None)
        dist = np.linalg.norm(f - basis @ coef)
        assert abs(best_approx_error(d, n, f) - dist) < 1e-10


def test_best_approx_error_monotone():
    d, _ = random_connected_decomposition(10, 44)
    f = normal_variates(make_rng(1), 10)
    errs = [best_approx_error(d, n, f) for n in range(1, 11)]
    assert all(errs[i] >= errs[i + 1] - 1e-12 for i in range(9))


def test_high_freq_energy_single_and_multi():
    d, _ = random_connected_decomposition(10, 55)
    f = normal_variates(make_rng(2), 10)
    coeffs = gft(d, f)
    expected = float(np.sum(coeffs[1:] ** 2))
    assert abs(high_freq_energy(d, f) - expected) < 1e-10
    mat = normal_variates(make_rng(8), 30).reshape(10, 3)
    per_channel = sum(high_freq_energy(d, mat[:, j]) for j in range(3))
    assert abs(high_freq_energy(d, mat) - per_channel) < 1e-10


def test_high_freq_energy_deflation_precision():
    # energy ratio 1e-20: far below what ||F||^2 - ||h1.F||^2 could
    # resolve (ulp of ||F||^2 = 1e12 is ~2e-4), fine for deflation
    d, _ = random_connected_decomposition(10, 66)
    f = d.eigenvectors[:, 0] * 1e6 + d.eigenvectors[:, 5] * 1e-4
    eh = high_freq_energy(d, f)
    assert abs(eh - 1e-8) < 1e-12


def test_direction_energies_sum_to_total():
    d, _ = random_connected_decomposition(9, 77)
    mat = normal_variates(make_rng(4), 27).reshape(9, 3)
    energies = direction_energies(d, mat)
    assert energies.shape == (9,)
    assert abs(energies.sum() - np.sum(mat**2)) < 1e-9
    assert abs(energies[2] - direction_energy(d, 3, mat)) < 1e-12
    with pytest.raises(IndexOutOfRange):
        direction_energy(d, 0, mat)


def test_dump_csv_round_trips_exactly(tmp_path):
    d = k2_decomposition()
    path = tmp_path / "dec.csv"
    dump_csv(d, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# ordering=ascending"
    lam = [float(x) for x in lines[1].split(",")]
    assert lam == d.eigenvalues.tolist()
    rows = [[float(x) for x in line.split(",")] for line in lines[2:]]
    assert np.array_equal(np.array(rows), d.eigenvectors)
