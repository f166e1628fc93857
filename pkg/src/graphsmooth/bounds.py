"""Machine-checkable margin reports for every inequality the library
implements.

Every check returns a BoundCheckReport whose records carry the two sides
of an inequality lhs <= rhs and the margin rhs - lhs. A report is
`violated` iff some margin falls below -(1e-9 (1 + |rhs|)). Checks whose
hypothesis fails (the weight-norm Assumption for the decay and lower
bounds) come back with applicable=False and no asserted records instead
of a pass/fail verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChannelMismatch, DimensionMismatch
from .filters import Filter, high_pass
from .gcn import LayerTrace
from .smoothness import (
    equivalence_lower_constant,
    jackson_constant,
    k_functional,
    k_functional_oracle,
    k_omega_lower_constant,
    modulus,
    multichannel_k,
    multichannel_modulus,
    operator_power,
    single_frequency_constant,
)
from .spectral import (
    SpectralDecomposition,
    best_approx_error,
    gft,
    project_pw,
)

#: a record violates its bound iff margin < -REL_SLACK * (1 + |rhs|)
REL_SLACK = 1e-9


def make_record(lhs: float, rhs: float, **params) -> dict:
    rec = dict(params)
    rec["lhs"] = float(lhs)
    rec["rhs"] = float(rhs)
    rec["margin"] = float(rhs) - float(lhs)
    return rec


def skipped_record(reason: str, **params) -> dict:
    rec = make_record(0.0, 0.0, **params)
    rec["skipped"] = reason
    return rec


@dataclass
class BoundCheckReport:
    """Named collection of inequality evaluations."""

    name: str
    records: list = field(default_factory=list)
    applicable: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def instances(self) -> int:
        return len(self.records)

    @property
    def worst_margin(self) -> float:
        if not self.records:
            return math.inf
        return min(r["margin"] for r in self.records)

    @property
    def violated(self) -> bool:
        return any(
            r["margin"] < -REL_SLACK * (1.0 + abs(r["rhs"])) for r in self.records
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "worst_margin": self.worst_margin,
            "violated": self.violated,
            "applicable": self.applicable,
            "metadata": self.metadata,
            "records": self.records,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "BoundCheckReport":
        return cls(
            name=data["name"],
            records=list(data["records"]),
            applicable=data.get("applicable", True),
            metadata=data.get("metadata", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "BoundCheckReport":
        return cls.from_dict(json.loads(text))


def merge_reports(reports, name: str | None = None) -> BoundCheckReport:
    """Deterministic merge: records concatenated in sorted parameter-key
    order; applicable iff every input is; metadata merged shallowly."""
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to merge")
    merged = BoundCheckReport(name=name or reports[0].name)
    metadata = {}
    for rep in reports:
        merged.records.extend(rep.records)
        merged.applicable = merged.applicable and rep.applicable
        metadata.update(rep.metadata)
    merged.records.sort(
        key=lambda r: tuple(
            sorted((k, repr(v)) for k, v in r.items() if k not in ("lhs", "rhs", "margin"))
        )
    )
    merged.metadata = metadata
    return merged


def _omega_per_band(d: SpectralDecomposition, f, r: int):
    """omega_r(f, lambda_n^{-1/2}) for n = 2..N, as a dict keyed by n."""
    out = {}
    for n in range(2, d.size + 1):
        lam_n = d.eigenvalues[n - 1]
        if lam_n <= 1e-12:
            continue
        out[n] = modulus(d, r, 1.0 / math.sqrt(lam_n), f).value
    return out


def check_jackson(
    d: SpectralDecomposition,
    f,
    r: int,
    cr_scale: float = 1.0,
    cr_prime_scale: float = 1.0,
) -> BoundCheckReport:
    """The three Jackson-type inequalities at every admissible n >= 2:

        direct:     E_n(f) <= C'_r omega_r(f, lambda_n^{-1/2})
        one_freq:   ||(P_n - P_{n-1}) f|| <= C_r omega_r(f, lambda_n^{-1/2})
        summed:     E_n(f) <= C_r sum_{k > n} omega_r(f, lambda_k^{-1/2})

    with C'_r = (4/pi)(r+3)^r (r+1) and C_r = (2 sin(1/2))^{-r}.
    The cr_scale / cr_prime_scale factors exist only as corruption hooks
    for mutation testing.
    """
    report = BoundCheckReport(name="jackson")
    omegas = _omega_per_band(d, f, r)
    coeffs = gft(d, f)
    c_prime = cr_prime_scale * jackson_constant(r)
    c_single = cr_scale * single_frequency_constant(r)
    tail = {}
    running = 0.0
    for n in range(d.size, 1, -1):
        tail[n] = running
        running += omegas.get(n, 0.0)
    for n in range(2, d.size + 1):
        if n not in omegas:
            report.records.append(
                skipped_record("degenerate eigenvalue", inequality="direct", n=n, r=r)
            )
            continue
        e_n = best_approx_error(d, n, f)
        report.records.append(
            make_record(e_n, c_prime * omegas[n], inequality="direct", n=n, r=r)
        )
        report.records.append(
            make_record(
                abs(coeffs[n - 1]), c_single * omegas[n], inequality="one_freq", n=n, r=r
            )
        )
        report.records.append(
            make_record(e_n, c_single * tail[n], inequality="summed", n=n, r=r)
        )
    return report


def check_equivalence_lemma2(
    d: SpectralDecomposition, f, r: int, n: int
) -> BoundCheckReport:
    """Bandlimited equivalence at band n:

        (2/pi)^r <= ||(T_{1/sqrt(lambda_n)} - I)^r P_n f||
                    / (lambda_n^{-r/2} ||S^{r/2} P_n f||)  <= 1

    plus the modulus domination

        lambda_n^{-r/2} ||S^{r/2} P_n f|| <= (pi/2)^r omega_r(f, 1/sqrt(lambda_n)).

    Degenerate cases (||S^{r/2} P_n f|| = 0, e.g. f supported on u_1)
    are recorded as skipped.
    """
    report = BoundCheckReport(name="equivalence")
    lam_n = d.eigenvalues[n - 1]
    if lam_n <= 1e-12:
        report.records.append(skipped_record("lambda_n ~ 0", n=n, r=r))
        return report
    t = 1.0 / math.sqrt(lam_n)
    p_n_f = project_pw(d, n, f)
    denom = lam_n ** (-r / 2.0) * float(
        np.linalg.norm(operator_power(d, r / 2.0, p_n_f))
    )
    if denom <= 1e-14 * max(1.0, float(np.linalg.norm(np.asarray(f)))):
        report.records.append(skipped_record("zero seminorm", n=n, r=r))
        report.metadata["skipped_degenerate"] = True
        return report
    coeffs = gft(d, p_n_f)
    sqrt_lam = np.sqrt(np.clip(d.eigenvalues, 0.0, None))
    numer = math.sqrt(
        float(
            np.sum(
                (4.0 * np.sin(0.5 * t * sqrt_lam) ** 2) ** r * np.abs(coeffs) ** 2
            )
        )
    )
    ratio = numer / denom
    report.records.append(
        make_record(equivalence_lower_constant(r), ratio, side="lower", n=n, r=r)
    )
    report.records.append(make_record(ratio, 1.0, side="upper", n=n, r=r))
    omega = modulus(d, r, t, f).value
    report.records.append(
        make_record(
            denom, (math.pi / 2.0) ** r * omega, side="omega_dominates", n=n, r=r
        )
    )
    return report


def check_k_omega(d: SpectralDecomposition, f, r: int, t_grid) -> BoundCheckReport:
    """Hard direction of the K-functional equivalence on a t grid:

        omega_r(f, t) <= 2^r K_r(f, t)

    for a single channel (1-D f) or the channel-sum version (2-D f).
    The soft-direction ratio K_r / omega_r is not a theorem with an
    explicit constant; its maximum over the grid is reported in
    metadata["measured_c2"].
    """
    report = BoundCheckReport(name="k_omega")
    arr = np.asarray(f)
    multi = arr.ndim == 2
    factor = 1.0 / k_omega_lower_constant(r)  # 2^r
    ratios = []
    for t in t_grid:
        if multi:
            om = multichannel_modulus(d, r, t, arr)
            kv = multichannel_k(d, r, t, arr)
        else:
            om = modulus(d, r, t, arr).value
            kv = k_functional(d, r, t, arr).value
        report.records.append(
            make_record(om, factor * kv, r=r, t=float(t), channels=int(arr.shape[1]) if multi else 1)
        )
        if om > 1e-14:
            ratios.append(kv / om)
    if ratios:
        report.metadata["measured_c2"] = max(ratios)
    return report


def check_k_oracle(d: SpectralDecomposition, f, r: int, t: float) -> BoundCheckReport:
    """Agreement of the family K-functional with the independent
    coordinate-descent oracle within 1e-6 relative."""
    report = BoundCheckReport(name="k_oracle")
    kv = k_functional(d, r, t, f).value
    ov = k_functional_oracle(d, r, t, f)
    gap = abs(kv - ov)
    report.records.append(
        make_record(gap, 1e-6 * (1.0 + max(abs(kv), abs(ov))), r=r, t=float(t))
    )
    report.metadata["k_value"] = kv
    report.metadata["oracle_value"] = ov
    return report


def check_modulus_properties(
    d: SpectralDecomposition,
    f,
    f2,
    r: int,
    t: float,
    scale_factors=(0.5, 2.0, 7.3),
) -> BoundCheckReport:
    """The four modulus properties at one (f, f2, r, t) instance:

        scaling:        omega_r(f, c t) <= (1 + c)^r omega_r(f, t)
        subadditivity:  omega_r(f + f2, t) <= omega_r(f, t) + omega_r(f2, t)
        order_drop:     omega_r(f, t) <= 2^j omega_{r-j}(f, t)
        seminorm_drop:  omega_r(f, t) <= t^j omega_{r-j}(S^{j/2} f, t)

    for j = 1..r (the last two are vacuous at r = 0).
    """
    report = BoundCheckReport(name="modulus_properties")
    base = modulus(d, r, t, f).value
    for c in scale_factors:
        lhs = modulus(d, r, c * t, f).value
        report.records.append(
            make_record(lhs, (1.0 + c) ** r * base, prop="scaling", c=float(c), r=r, t=t)
        )
    lhs = modulus(d, r, t, np.asarray(f) + np.asarray(f2)).value
    report.records.append(
        make_record(lhs, base + modulus(d, r, t, f2).value, prop="subadditivity", r=r, t=t)
    )
    for j in range(1, r + 1):
        lower = modulus(d, r - j, t, f).value
        report.records.append(
            make_record(base, 2.0**j * lower, prop="order_drop", j=j, r=r, t=t)
        )
        powered = operator_power(d, j / 2.0, f)
        lower_pow = modulus(d, r - j, t, powered).value
        report.records.append(
            make_record(base, t**j * lower_pow, prop="seminorm_drop", j=j, r=r, t=t)
        )
    return report


def check_translation_identity(num_samples: int = 10000, seed: int = 0) -> BoundCheckReport:
    """|e^{ih} - 1|^2 = 4 sin^2(h/2) on random h in [-100, 100]; the
    maximum absolute deviation must stay below 1e-12."""
    rng = np.random.Generator(np.random.PCG64(seed))
    h = rng.uniform(-100.0, 100.0, size=num_samples)
    lhs = np.abs(np.exp(1j * h) - 1.0) ** 2
    rhs = 4.0 * np.sin(0.5 * h) ** 2
    err = float(np.max(np.abs(lhs - rhs)))
    report = BoundCheckReport(name="translation_identity")
    report.records.append(make_record(err, 1e-12, samples=num_samples))
    return report


def check_relu_projection(h1, f) -> BoundCheckReport:
    """ReLU never raises energy off a nonnegative direction:

        ||P sigma(f)||^2 <= ||P f||^2,   P = I - h1 h1^T

    for unit h1 with nonnegative entries. `f` may be a single vector or
    an (N, cases) batch; one record per case.
    """
    h1 = np.asarray(h1, dtype=float)
    if np.any(h1 < -1e-10):
        raise ValueError("h1 must be entrywise nonnegative")
    if abs(float(np.linalg.norm(h1)) - 1.0) > 1e-10:
        raise ValueError("h1 must be a unit vector")
    mat = np.asarray(f, dtype=float)
    if mat.ndim == 1:
        mat = mat[:, None]
    if mat.shape[0] != h1.shape[0]:
        raise DimensionMismatch("h1 and f disagree on N")
    sig = np.maximum(mat, 0.0)
    p_f = np.sum(mat**2, axis=0) - (h1 @ mat) ** 2
    p_sig = np.sum(sig**2, axis=0) - (h1 @ sig) ** 2
    report = BoundCheckReport(name="relu_projection")
    for j in range(mat.shape[1]):
        report.records.append(make_record(p_sig[j], p_f[j], case=j))
    return report


def _assumption_holds(trace: LayerTrace, filt: Filter) -> tuple[bool, str]:
    worst = max(trace.weight_norms) if trace.weight_norms else 0.0
    if worst > 1.0 + 1e-12:
        return False, f"max ||W||_F = {worst:g} exceeds 1"
    if filt.mu_high > 1.0 + 1e-9:
        return False, f"mu_high = {filt.mu_high:g} exceeds 1"
    return True, ""


def check_decay_bound(trace: LayerTrace, filt: Filter, features) -> BoundCheckReport:
    """High-frequency energy decay under the weight-norm assumption:

        E_h(F^(k)) <= mu_high^{2k} ||F^(0)||_F^2        (closed form)
        E_h(F^(k+1)) <= mu_high^2 E_h(F^(k)) + 1e-9 ||F^(0)||_F^2
                                                        (induction form)

    plus, when mu_high^K sqrt(N) ||F^(0)||_F <= 1e-7, the vanishing of
    sum_j |<f_j^(K), v>| (<= 1e-6) for a seeded random unit v
    orthogonal to h_1. Not applicable (no asserted records) when some
    ||W^(k)||_F exceeds 1. Energies are taken in the filter's energy
    coordinates; `features` must be the trace's input F^(0).
    """
    report = BoundCheckReport(name="decay_bound")
    ok, why = _assumption_holds(trace, filt)
    if not ok:
        report.applicable = False
        report.metadata["reason"] = why
        return report
    g0 = filt.to_energy_coordinates(np.asarray(features, dtype=float))
    norm0_sq = float(np.sum(g0**2))
    mu = filt.mu_high
    eh = trace.eh_per_layer
    for k in range(1, len(eh)):
        report.records.append(
            make_record(eh[k], mu ** (2 * k) * norm0_sq, form="closed", k=k)
        )
        report.records.append(
            make_record(
                eh[k], mu**2 * eh[k - 1] + 1e-9 * norm0_sq, form="induction", k=k
            )
        )
    depth = len(eh) - 1
    n = filt.num_nodes
    premise = mu**depth * math.sqrt(n) * math.sqrt(norm0_sq)
    report.metadata["orthogonal_premise"] = premise
    if premise <= 1e-7:
        rng = np.random.Generator(np.random.PCG64(trace.config.seed))
        v = rng.standard_normal(n)
        h1 = filt.h1
        v -= (v @ h1) * h1
        v /= np.linalg.norm(v)
        g_final = filt.to_energy_coordinates(trace.outputs[-1])
        overlap = float(np.sum(np.abs(v @ g_final)))
        report.records.append(make_record(overlap, 1e-6, form="orthogonal_decay", k=depth))
    report.metadata["coordinates"] = trace.coordinates
    return report


def check_lower_bound(
    f_target, trace: LayerTrace, filt: Filter, r: int, t_grid
) -> BoundCheckReport:
    """Approximation lower bound against every trace depth k and every t:

        ||F - F^(k)||_F >= m^{-1/2} 2^{-r} W_r(F, t; Htilde)
                           - 2^{-r} t^r mu_high^{k + r/2} ||F^(0)||_F

    with W_r the channel-sum modulus taken over the high-pass spectrum.
    Requires the target channel count to match the trace output
    (ChannelMismatch) and the weight-norm assumption (not applicable
    otherwise). All norms are taken in the filter's energy coordinates.
    """
    report = BoundCheckReport(name="lower_bound")
    target = np.asarray(f_target, dtype=float)
    if target.ndim != 2:
        raise DimensionMismatch("target must be 2-D (N, m)")
    m = target.shape[1]
    if trace.outputs[-1].shape[1] != m:
        raise ChannelMismatch(
            f"target has {m} channels, trace output has {trace.outputs[-1].shape[1]}"
        )
    ok, why = _assumption_holds(trace, filt)
    if not ok:
        report.applicable = False
        report.metadata["reason"] = why
        return report
    hp = high_pass(filt)
    g_target = filt.to_energy_coordinates(target)
    g0 = filt.to_energy_coordinates(trace.outputs[0])
    norm0 = float(np.linalg.norm(g0))
    mu = filt.mu_high
    scale = 2.0 ** (-r) / math.sqrt(m)
    for t in t_grid:
        w_rt = multichannel_modulus(hp.decomposition, r, float(t), g_target)
        for k in range(1, len(trace.outputs)):
            g_k = filt.to_energy_coordinates(trace.outputs[k])
            lhs_bound = scale * w_rt - 2.0 ** (-r) * float(t) ** r * mu ** (
                k + r / 2.0
            ) * norm0
            dist = float(np.linalg.norm(g_target - g_k))
            report.records.append(
                make_record(lhs_bound, dist, r=r, t=float(t), k=k)
            )
    report.metadata["coordinates"] = trace.coordinates
    return report


def check_filter_spectrum(filt: Filter, predicted_h1) -> BoundCheckReport:
    """Filter spectrum sanity: eigenvalues inside (-1 - 1e-9, 1 + 1e-9],
    top eigenvalue 1, and the predicted top eigenvector reproduced with
    residual <= 1e-8."""
    report = BoundCheckReport(name="filter_spectrum")
    lam = filt.decomposition.eigenvalues
    report.records.append(
        make_record(float(lam[0]), 1.0 + 1e-9, check="upper_range", kind=filt.kind)
    )
    report.records.append(
        make_record(-1.0 - 1e-9, float(lam[-1]), check="lower_range", kind=filt.kind)
    )
    report.records.append(
        make_record(abs(float(lam[0]) - 1.0), 1e-9, check="top_is_one", kind=filt.kind)
    )
    v = np.asarray(predicted_h1, dtype=float)
    v = v / np.linalg.norm(v)
    if filt.conjugated:
        operator = np.diag(filt.coordinate_transform[0]) @ filt.matrix @ np.diag(
            filt.coordinate_transform[1]
        )
    else:
        operator = filt.matrix
    residual = float(np.linalg.norm(operator @ v - v))
    report.records.append(
        make_record(residual, 1e-8, check="top_eigenpair", kind=filt.kind)
    )
    overlap = abs(float(v @ filt.h1))
    report.records.append(
        make_record(1.0 - 1e-8, overlap, check="h1_alignment", kind=filt.kind)
    )
    return report
