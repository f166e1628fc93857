"""Inequality checkers and the report container."""

import json
import math
import random

import numpy as np
import pytest

from graphsmooth.bounds import (
    BoundCheckReport,
    check_decay_bound,
    check_equivalence_lemma2,
    check_filter_spectrum,
    check_jackson,
    check_k_omega,
    check_k_oracle,
    check_lower_bound,
    check_modulus_properties,
    check_relu_projection,
    check_translation_identity,
    make_record,
    merge_reports,
    skipped_record,
)
from graphsmooth.errors import ChannelMismatch, DimensionMismatch
from graphsmooth.filters import build_filter_gcn, build_filter_surgery
from graphsmooth.gcn import GcnConfig, forward
from graphsmooth.graphs import build_graph, combinatorial_laplacian
from graphsmooth.spectral import decompose_psd
from graphsmooth.synth import SbmParams, make_rng, normal_variates, sample_sbm

SQ2 = math.sqrt(2.0)


def k2_graph():
    return build_graph(np.array([[0.0, 1.0], [1.0, 0.0]]))


def k2():
    return decompose_psd(combinatorial_laplacian(k2_graph()))


def connected_instance(n, seed):
    for s in range(seed, seed + 50):
        g = sample_sbm(SbmParams(n, 0.8, 0.3, seed=s))
        d = decompose_psd(combinatorial_laplacian(g))
        if d.eigenvalues[1] > 1e-8:
            return g, d
    raise RuntimeError("no connected draw")


# -- records and report container --------------------------------------------


def test_make_record_margin():
    rec = make_record(1.0, 3.0, tag="x")
    assert rec["margin"] == 2.0
    assert rec["tag"] == "x"


def test_skipped_record_is_neutral():
    rec = skipped_record("why", n=4)
    assert rec["margin"] == 0.0
    assert rec["skipped"] == "why"


def test_report_violation_threshold():
    rep = BoundCheckReport(name="t")
    rep.records.append(make_record(1.0 + 0.5e-9 * 2.0, 1.0))  # inside slack
    assert not rep.violated
    rep.records.append(make_record(1.0 + 4e-9 * 2.0, 1.0))  # outside slack
    assert rep.violated


def test_report_empty_worst_margin_infinite():
    assert BoundCheckReport(name="t").worst_margin == math.inf
    assert not BoundCheckReport(name="t").violated


def test_report_json_round_trip():
    rep = BoundCheckReport(name="demo", metadata={"alpha": 0.5})
    rep.records.append(make_record(0.3, 0.9, n=2, r=1))
    rep.records.append(skipped_record("degenerate", n=3))
    back = BoundCheckReport.from_json(rep.to_json())
    assert back.name == "demo"
    assert back.records == rep.records
    assert back.metadata == {"alpha": 0.5}
    assert back.worst_margin == rep.worst_margin
    payload = json.loads(rep.to_json())
    assert set(payload) == {
        "name",
        "instances",
        "worst_margin",
        "violated",
        "applicable",
        "metadata",
        "records",
    }


def test_merge_reports_deterministic_order():
    _, d = connected_instance(10, 500)
    f = normal_variates(make_rng(1), 10)
    reports = [check_jackson(d, f, r) for r in (1, 2, 3)]
    merged_fwd = merge_reports(reports)
    shuffled = reports[::-1]
    random.Random(0).shuffle(shuffled)
    merged_rev = merge_reports(shuffled)
    assert merged_fwd.records == merged_rev.records
    with pytest.raises(ValueError):
        merge_reports([])


# -- jackson ------------------------------------------------------------------


def test_jackson_k2_single_frequency_equality():
    """|fhat_2| = C_1 omega_1(f, 1/sqrt(2)) exactly on K2 with f=(1,0):
    both sides reduce to 1/sqrt(2)."""
    rep = check_jackson(k2(), np.array([1.0, 0.0]), 1)
    one_freq = [r for r in rep.records if r.get("inequality") == "one_freq"]
    assert len(one_freq) == 1
    assert abs(one_freq[0]["lhs"] - 1 / SQ2) < 1e-12
    assert abs(one_freq[0]["margin"]) < 1e-9
    assert not rep.violated


def test_jackson_clean_on_random_instances():
    for i in range(4):
        _, d = connected_instance(12, 600 + i)
        rng = make_rng(i)
        f = normal_variates(rng, 12)
        if i == 2:
            f = f + 1j * normal_variates(rng, 12)
        rep = check_jackson(d, f, 1 + i % 3)
        assert rep.instances == 3 * 11  # three inequalities per band
        assert not rep.violated


def test_jackson_corruption_flips_on_top_eigenvector():
    _, d = connected_instance(10, 700)
    u_top = d.eigenvectors[:, -1].copy()
    clean = check_jackson(d, u_top, 1)
    assert not clean.violated
    corrupt = check_jackson(d, u_top, 1, cr_scale=0.5)
    assert corrupt.violated
    worst = min(r["margin"] for r in corrupt.records if r.get("inequality") == "one_freq")
    assert worst < -0.1  # decisive, not a borderline flip


def test_jackson_skips_degenerate_bands():
    adj = np.zeros((4, 4))
    adj[0, 1] = adj[1, 0] = 1.0
    adj[2, 3] = adj[3, 2] = 1.0
    d = decompose_psd(combinatorial_laplacian(build_graph(adj)))
    rep = check_jackson(d, np.array([1.0, 0.0, 0.0, 0.0]), 1)
    skipped = [r for r in rep.records if "skipped" in r]
    assert len(skipped) == 1 and skipped[0]["n"] == 2
    assert not rep.violated


# -- equivalence --------------------------------------------------------------


def test_equivalence_k2_frozen_ratio():
    rep = check_equivalence_lemma2(k2(), np.array([1.0, 0.0]), 1, 2)
    lower = [r for r in rep.records if r.get("side") == "lower"][0]
    ratio = lower["rhs"]
    assert abs(ratio - 2 * math.sin(0.5)) < 1e-12
    assert not rep.violated


def test_equivalence_random_instances_in_band():
    for i in range(4):
        _, d = connected_instance(10, 800 + i)
        f = normal_variates(make_rng(i), 10)
        for n in range(2, 11):
            rep = check_equivalence_lemma2(d, f, i % 4, n)
            assert not rep.violated


def test_equivalence_skips_kernel_signal():
    _, d = connected_instance(8, 900)
    f = d.eigenvectors[:, 0].copy()  # flat signal, zero seminorm
    rep = check_equivalence_lemma2(d, f, 2, 3)
    assert rep.instances == 1
    assert "skipped" in rep.records[0]
    assert rep.metadata.get("skipped_degenerate") is True


# -- k_omega / k_oracle / modulus properties / translation --------------------


def test_k_omega_single_and_multichannel():
    _, d = connected_instance(9, 1000)
    rng = make_rng(3)
    f = normal_variates(rng, 9)
    rep = check_k_omega(d, f, 2, np.logspace(-2, 1, 4))
    assert rep.instances == 4 and not rep.violated
    assert rep.metadata["measured_c2"] > 0
    mat = normal_variates(rng, 27).reshape(9, 3)
    rep2 = check_k_omega(d, mat, 1, np.array([0.5, 2.0]))
    assert rep2.records[0]["channels"] == 3
    assert not rep2.violated


def test_k_oracle_report():
    _, d = connected_instance(8, 1100)
    f = normal_variates(make_rng(4), 8)
    rep = check_k_oracle(d, f, 2, 1.3)
    assert rep.instances == 1 and not rep.violated
    assert abs(rep.metadata["k_value"] - rep.metadata["oracle_value"]) < 1e-8


def test_modulus_properties_instance_count():
    _, d = connected_instance(8, 1200)
    rng = make_rng(5)
    f, f2 = normal_variates(rng, 8), normal_variates(rng, 8)
    rep = check_modulus_properties(d, f, f2, 3, 0.8)
    # 3 scalings + subadditivity + (order_drop + seminorm_drop) per j
    assert rep.instances == 3 + 1 + 2 * 3
    assert not rep.violated
    rep0 = check_modulus_properties(d, f, f2, 0, 0.8)
    assert rep0.instances == 4  # drops vacuous at r = 0
    assert not rep0.violated


def test_translation_identity_tight():
    rep = check_translation_identity(num_samples=2000, seed=1)
    assert rep.instances == 1
    assert rep.records[0]["lhs"] <= 1e-12
    assert not rep.violated


# -- relu projection ----------------------------------------------------------


def test_relu_projection_flat_direction():
    n = 16
    h1 = np.ones(n) / math.sqrt(n)
    mat = normal_variates(make_rng(6), n * 40).reshape(n, 40)
    rep = check_relu_projection(h1, mat)
    assert rep.instances == 40
    assert not rep.violated


def test_relu_projection_validates_h1():
    with pytest.raises(ValueError):
        check_relu_projection(np.array([0.5, -0.5]), np.ones(2))
    with pytest.raises(ValueError):
        check_relu_projection(np.array([1.0, 1.0]), np.ones(2))
    with pytest.raises(DimensionMismatch):
        check_relu_projection(np.ones(3) / math.sqrt(3.0), np.ones(4))


# -- decay bound --------------------------------------------------------------


def theorem_trace(g, filt, n, depth, seed):
    cfg = GcnConfig(
        variant="plain", depth=depth, widths=(n,) * (depth + 1), weight_frobenius=1.0, seed=seed
    )
    f0 = normal_variates(make_rng(seed + 1), n * n).reshape(n, n)
    return cfg, f0, forward(cfg, filt, f0)


def test_decay_bound_theorem_mode():
    g, _ = connected_instance(12, 1300)
    filt = build_filter_gcn(g)
    _, f0, trace = theorem_trace(g, filt, 12, 10, seed=2)
    rep = check_decay_bound(trace, filt, f0)
    assert rep.applicable and not rep.violated
    forms = {r["form"] for r in rep.records}
    assert forms == {"closed", "induction"}
    assert rep.instances == 2 * 10


def test_decay_bound_not_applicable_at_experiment_norms():
    g, _ = connected_instance(12, 1400)
    filt = build_filter_gcn(g)
    cfg = GcnConfig(variant="plain", depth=4, widths=(12,) * 5, weight_frobenius=10.0, seed=3)
    f0 = normal_variates(make_rng(9), 144).reshape(12, 12)
    trace = forward(cfg, filt, f0)
    rep = check_decay_bound(trace, filt, f0)
    assert not rep.applicable
    assert rep.instances == 0
    assert "exceeds 1" in rep.metadata["reason"]
    assert not rep.violated


def test_decay_bound_orthogonal_clause_fires():
    """mu_high = 0.2 at depth 30 pushes the premise far below 1e-7, so
    the orthogonal-direction overlap record must appear and hold."""
    g, _ = connected_instance(8, 1500)
    filt = build_filter_surgery(build_filter_gcn(g), 0.2)
    _, f0, trace = theorem_trace(g, filt, 8, 30, seed=4)
    rep = check_decay_bound(trace, filt, f0)
    assert rep.metadata["orthogonal_premise"] <= 1e-7
    ortho = [r for r in rep.records if r.get("form") == "orthogonal_decay"]
    assert len(ortho) == 1
    assert ortho[0]["lhs"] <= 1e-6
    assert not rep.violated


# -- lower bound --------------------------------------------------------------


def test_lower_bound_random_targets():
    g, _ = connected_instance(10, 1600)
    filt = build_filter_gcn(g)
    cfg = GcnConfig(variant="plain", depth=8, widths=(4,) * 9, weight_frobenius=1.0, seed=5)
    f0 = normal_variates(make_rng(11), 40).reshape(10, 4)
    trace = forward(cfg, filt, f0)
    target = normal_variates(make_rng(12), 40).reshape(10, 4)
    for r in (0, 1, 2):
        rep = check_lower_bound(target, trace, filt, r, np.array([0.1, 1.0, 5.0]))
        assert rep.applicable and not rep.violated
        assert rep.instances == 3 * 8


def test_lower_bound_self_target_consistency():
    # target = the trace's own final output: distance 0 at k = K forces
    # the bound itself to be <= 0 there
    g, _ = connected_instance(10, 1700)
    filt = build_filter_gcn(g)
    cfg = GcnConfig(variant="plain", depth=6, widths=(3,) * 7, weight_frobenius=1.0, seed=6)
    f0 = normal_variates(make_rng(13), 30).reshape(10, 3)
    trace = forward(cfg, filt, f0)
    rep = check_lower_bound(trace.outputs[-1], trace, filt, 1, np.array([0.5]))
    assert not rep.violated
    final = [r for r in rep.records if r["k"] == 6][0]
    assert final["rhs"] < 1e-12  # distance to itself


def test_lower_bound_channel_mismatch():
    g, _ = connected_instance(8, 1800)
    filt = build_filter_gcn(g)
    cfg = GcnConfig(variant="plain", depth=3, widths=(4,) * 4, weight_frobenius=1.0, seed=7)
    f0 = normal_variates(make_rng(14), 32).reshape(8, 4)
    trace = forward(cfg, filt, f0)
    with pytest.raises(ChannelMismatch):
        check_lower_bound(np.zeros((8, 3)), trace, filt, 1, [1.0])
    with pytest.raises(DimensionMismatch):
        check_lower_bound(np.zeros(8), trace, filt, 1, [1.0])


# -- filter spectrum ----------------------------------------------------------


def test_filter_spectrum_k2_gcn():
    filt = build_filter_gcn(k2_graph())
    assert np.allclose(filt.decomposition.eigenvalues, [1.0, 0.0])
    rep = check_filter_spectrum(filt, np.sqrt(np.array([2.0, 2.0])))
    assert not rep.violated
    checks = {r["check"] for r in rep.records}
    assert {"upper_range", "lower_range", "top_is_one", "top_eigenpair", "h1_alignment"} <= checks
