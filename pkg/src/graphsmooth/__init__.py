"""Spectral smoothness on graphs: moduli of smoothness, K-functionals,
Jackson-type approximation bounds, and high-frequency energy dynamics of
graph convolutional layers, with numeric checks for every inequality."""

__version__ = "0.1.0"

from .bounds import (
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
    merge_reports,
)
from .errors import GraphSmoothError
from .experiments import (
    ExperimentConfig,
    run_decay,
    run_skip,
    run_surgery,
    run_verify,
)
from .filters import (
    Filter,
    build_filter_gcn,
    build_filter_rw,
    build_filter_surgery,
    build_filter_sym,
    high_pass,
)
from .gcn import GcnConfig, LayerTrace, forward
from .graphs import (
    Graph,
    build_graph,
    combinatorial_laplacian,
    degrees,
    is_connected,
    load_graph,
    normalized_laplacian,
)
from .smoothness import (
    jackson_constant,
    k_functional,
    k_functional_oracle,
    modulus,
    single_frequency_constant,
    translate,
)
from .spectral import (
    SpectralDecomposition,
    best_approx_error,
    decompose_psd,
    eigendecompose,
    gft,
    high_freq_energy,
    igft,
    project_pw,
)
from .synth import GmmParams, SbmParams, sample_gmm_features, sample_sbm, sample_weight

__all__ = [
    "BoundCheckReport",
    "ExperimentConfig",
    "Filter",
    "GcnConfig",
    "GmmParams",
    "Graph",
    "GraphSmoothError",
    "LayerTrace",
    "SbmParams",
    "SpectralDecomposition",
    "best_approx_error",
    "build_filter_gcn",
    "build_filter_rw",
    "build_filter_surgery",
    "build_filter_sym",
    "build_graph",
    "check_decay_bound",
    "check_equivalence_lemma2",
    "check_filter_spectrum",
    "check_jackson",
    "check_k_omega",
    "check_k_oracle",
    "check_lower_bound",
    "check_modulus_properties",
    "check_relu_projection",
    "check_translation_identity",
    "combinatorial_laplacian",
    "decompose_psd",
    "degrees",
    "eigendecompose",
    "forward",
    "gft",
    "high_freq_energy",
    "high_pass",
    "igft",
    "is_connected",
    "jackson_constant",
    "k_functional",
    "k_functional_oracle",
    "load_graph",
    "merge_reports",
    "modulus",
    "normalized_laplacian",
    "project_pw",
    "run_decay",
    "run_skip",
    "run_surgery",
    "run_verify",
    "sample_gmm_features",
    "sample_sbm",
    "sample_weight",
    "single_frequency_constant",
    "translate",
]
