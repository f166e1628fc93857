"""Random generators: determinism, distribution moments, validation."""

import math

import numpy as np
import pytest

from graphsmooth.errors import DimensionMismatch
from graphsmooth.synth import (
    GmmParams,
    SbmParams,
    balanced_labels,
    make_rng,
    normal_variates,
    sample_gmm_features,
    sample_sbm,
    sample_weight,
)


def test_make_rng_deterministic():
    a = make_rng(42).random(8)
    b = make_rng(42).random(8)
    assert np.array_equal(a, b)
    c = make_rng(43).random(8)
    assert not np.array_equal(a, c)


def test_normal_variates_bit_identical_rerun():
    x = normal_variates(make_rng(7), 1001)
    y = normal_variates(make_rng(7), 1001)
    assert np.array_equal(x, y)
    assert x.shape == (1001,)


def test_normal_variates_moments():
    x = normal_variates(make_rng(0), 200_000)
    # mean se ~ 1/sqrt(n), var se ~ sqrt(2/n); allow 4 sigma
    assert abs(x.mean()) < 4.0 / math.sqrt(x.size)
    assert abs(x.var() - 1.0) < 4.0 * math.sqrt(2.0 / x.size)
    assert abs((x**3).mean()) < 4.0 * math.sqrt(15.0 / x.size)


def test_normal_variates_odd_count_prefix_of_even():
    rng1 = make_rng(5)
    rng2 = make_rng(5)
    odd = normal_variates(rng1, 7)
    even = normal_variates(rng2, 8)
    assert np.array_equal(odd, even[:7])


def test_balanced_labels():
    assert np.array_equal(balanced_labels(4), [1, 1, -1, -1])
    assert np.array_equal(balanced_labels(5), [1, 1, 1, -1, -1])


def test_sbm_params_validation():
    with pytest.raises(ValueError):
        SbmParams(10, 0.3, 0.8, seed=0)  # q > p
    with pytest.raises(ValueError):
        SbmParams(10, 1.2, 0.1, seed=0)
    with pytest.raises(DimensionMismatch):
        SbmParams(1, 0.5, 0.1, seed=0)
    with pytest.raises(ValueError):
        SbmParams(4, 0.5, 0.1, seed=0, labels=np.array([1, 0, -1, 1]))
    with pytest.raises(DimensionMismatch):
        SbmParams(4, 0.5, 0.1, seed=0, labels=np.array([1, -1]))


def test_sbm_complete_graph_edge_case():
    g = sample_sbm(SbmParams(6, 1.0, 1.0, seed=3))
    assert g.adjacency.sum() == 6 * 5


def test_sbm_empty_graph_edge_case():
    g = sample_sbm(SbmParams(6, 0.0, 0.0, seed=3))
    assert g.adjacency.sum() == 0


def test_sbm_deterministic():
    a = sample_sbm(SbmParams(30, 0.7, 0.2, seed=11)).adjacency
    b = sample_sbm(SbmParams(30, 0.7, 0.2, seed=11)).adjacency
    assert np.array_equal(a, b)


def test_sbm_block_densities():
    n = 120
    params = SbmParams(n, 0.8, 0.3, seed=5)
    counts_intra = counts_inter = edges_intra = edges_inter = 0
    for rep in range(3):
        g = sample_sbm(SbmParams(n, 0.8, 0.3, seed=5 + rep))
        y = params.labels
        for i in range(n):
            for j in range(i + 1, n):
                if y[i] == y[j]:
                    counts_intra += 1
                    edges_intra += g.adjacency[i, j]
                else:
                    counts_inter += 1
                    edges_inter += g.adjacency[i, j]
    p_hat = edges_intra / counts_intra
    q_hat = edges_inter / counts_inter
    assert abs(p_hat - 0.8) < 3.0 * math.sqrt(0.8 * 0.2 / counts_intra)
    assert abs(q_hat - 0.3) < 3.0 * math.sqrt(0.3 * 0.7 / counts_inter)


def test_gmm_params_validation():
    with pytest.raises(DimensionMismatch):
        GmmParams(np.ones(3), 1.0, 4, seed=0)
    with pytest.raises(ValueError):
        GmmParams(np.ones(3), 0.0, 3, seed=0)


def test_gmm_features_shape_and_mean_structure():
    y = balanced_labels(40)
    mu = np.array([2.0, -1.0, 0.5])
    f = sample_gmm_features(y, GmmParams(mu, 1e-12, 3, seed=9))
    # at sigma ~ 0 the features collapse onto the label/mean outer product
    assert f.shape == (40, 3)
    assert np.allclose(f, np.outer(y, mu), atol=1e-9)


def test_gmm_features_noise_moments():
    y = balanced_labels(200)
    mu = np.zeros(5)
    f = sample_gmm_features(y, GmmParams(mu, 3.0, 5, seed=2))
    flat = f.ravel()
    assert abs(flat.mean()) < 4.0 * 3.0 / math.sqrt(flat.size)
    assert abs(flat.std() - 3.0) < 0.15


def test_sample_weight_exact_frobenius():
    for seed in range(5):
        w = sample_weight(17, 23, 10.0, seed=seed)
        assert w.shape == (17, 23)
        assert abs(np.linalg.norm(w) - 10.0) <= 1e-12 * 10.0


def test_sample_weight_one_by_one_is_sign():
    w = sample_weight(1, 1, 1.0, seed=4)
    assert w.shape == (1, 1)
    assert abs(abs(w[0, 0]) - 1.0) < 1e-15


def test_sample_weight_validation():
    with pytest.raises(DimensionMismatch):
        sample_weight(0, 3, 1.0, seed=0)
    with pytest.raises(ValueError):
        sample_weight(2, 2, 0.0, seed=0)
