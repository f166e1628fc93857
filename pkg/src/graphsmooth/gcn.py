"""Layer recursions for graph convolutional networks and skip variants.

Variants and their layer maps (sigma = entrywise ReLU, H the filter):

    plain:  F^(k+1) = sigma(H F^(k) W^(k))          (sigma optional at the
                                                     final layer)
    resgcn: F^(k+1) = sigma(H F^(k) W^(k)) + F^(k)  (no sigma at the final
                                                     layer)
    appnp:  F^(k+1) = (1-a_k) H F^(k) + a_k F^(0) W^(k)   (never sigma)
    gcnii:  F^(k+1) = sigma(((1-a_k) H F^(k) + a_k F^(0))
                            (b_k W^(k) + (1-b_k) I))      (no sigma at the
                                                           final layer)

Weights are drawn with synth.sample_weight at the configured Frobenius
norm; layer k uses the derived seed config.seed * 2^20 + k, so per-trial
seeds (base + trial index) never share a layer stream across trials.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ChannelMismatch, ConfigError, DimensionMismatch, ZeroSignal
from .filters import Filter
from .spectral import high_freq_energy
from .synth import sample_weight

VARIANTS = ("plain", "resgcn", "appnp", "gcnii")

#: seed stride between consecutive layers' weight draws
LAYER_SEED_STRIDE = 2**20


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def normalize_frobenius(f) -> np.ndarray:
    """F / ||F||_F; raises ZeroSignal on an all-zero input."""
    arr = np.asarray(f, dtype=float)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ZeroSignal("cannot Frobenius-normalize a zero signal")
    return arr / norm


@dataclass(frozen=True)
class GcnConfig:
    """Forward-pass configuration.

    `widths` has length depth + 1 (m_0 .. m_K); skip variants require a
    constant width. `alpha` and `beta` broadcast from scalars to
    per-layer tuples. `relu_final` applies to the plain variant only.
    """

    variant: str
    depth: int
    widths: tuple
    weight_frobenius: float
    seed: int
    alpha: tuple | float = 0.5
    beta: tuple | float = 0.5
    relu_final: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1, got {self.depth}")
        widths = tuple(int(w) for w in self.widths)
        if len(widths) != self.depth + 1:
            raise ConfigError(
                f"widths must have length depth+1={self.depth + 1}, got {len(widths)}"
            )
        if any(w < 1 for w in widths):
            raise ConfigError("widths must be positive")
        if self.variant != "plain" and len(set(widths)) != 1:
            raise ConfigError(f"{self.variant} requires a constant width")
        if not self.weight_frobenius > 0:
            raise ConfigError("weight_frobenius must be positive")
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "alpha", _per_layer(self.alpha, self.depth, "alpha"))
        object.__setattr__(self, "beta", _per_layer(self.beta, self.depth, "beta"))


def _per_layer(value, depth: int, name: str) -> tuple:
    if np.isscalar(value):
        return (float(value),) * depth
    seq = tuple(float(v) for v in value)
    if len(seq) != depth:
        raise ConfigError(f"{name} must have one entry per layer ({depth})")
    return seq


@dataclass(frozen=True)
class LayerTrace:
    """Forward-pass record.

    outputs[k] is F^(k) in the network's own coordinates; eh_per_layer
    and frob_per_layer are computed in the filter's energy coordinates
    (`coordinates` = "conjugated" for the random-walk filter, "standard"
    otherwise). weight_norms[k] = ||W^(k)||_F.
    """

    config: GcnConfig
    filter_kind: str
    outputs: list = field(repr=False)
    eh_per_layer: list = field(default_factory=list)
    frob_per_layer: list = field(default_factory=list)
    weight_norms: list = field(default_factory=list)
    coordinates: str = "standard"

    @property
    def depth(self) -> int:
        return len(self.outputs) - 1


def layer_seed(base_seed: int, layer: int) -> int:
    """Weight seed for a layer: base * 2^20 + layer (see module docstring)."""
    return base_seed * LAYER_SEED_STRIDE + layer


def forward(config: GcnConfig, filt: Filter, features, weights=None) -> LayerTrace:
    """Run the configured recursion and record per-layer diagnostics.

    `features` is the (N, m_0) input F^(0). `weights` optionally injects
    the weight matrices (a list of depth arrays) instead of drawing them
    from the seed; shapes must match `config.widths`.
    """
    f0 = np.asarray(features, dtype=float)
    if f0.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D, got ndim={f0.ndim}")
    if f0.shape[0] != filt.num_nodes:
        raise DimensionMismatch(
            f"features rows {f0.shape[0]} != graph size {filt.num_nodes}"
        )
    if f0.shape[1] != config.widths[0]:
        raise ChannelMismatch(
            f"features have {f0.shape[1]} channels, config expects {config.widths[0]}"
        )
    if weights is None:
        weights = [
            sample_weight(
                config.widths[k],
                config.widths[k + 1],
                config.weight_frobenius,
                layer_seed(config.seed, k),
            )
            for k in range(config.depth)
        ]
    else:
        weights = [np.asarray(w, dtype=float) for w in weights]
        if len(weights) != config.depth:
            raise ConfigError(f"need {config.depth} weight matrices")
        for k, w in enumerate(weights):
            if w.shape != (config.widths[k], config.widths[k + 1]):
                raise DimensionMismatch(
                    f"weight {k} shape {w.shape} != "
                    f"({config.widths[k]}, {config.widths[k + 1]})"
                )

    h = filt.matrix
    outputs = [f0]
    current = f0
    for k in range(config.depth):
        final = k == config.depth - 1
        w = weights[k]
        if config.variant == "plain":
            pre = h @ current @ w
            current = relu(pre) if (not final or config.relu_final) else pre
        elif config.variant == "resgcn":
            pre = h @ current @ w
            current = (pre if final else relu(pre)) + current
        elif config.variant == "appnp":
            a = config.alpha[k]
            current = (1.0 - a) * (h @ current) + a * (f0 @ w)
        else:  # gcnii
            a, b = config.alpha[k], config.beta[k]
            mixed = (1.0 - a) * (h @ current) + a * f0
            pre = mixed @ (b * w + (1.0 - b) * np.eye(w.shape[0]))
            current = pre if final else relu(pre)
        outputs.append(current)

    eh, frob = [], []
    for f_k in outputs:
        g_k = filt.to_energy_coordinates(f_k)
        eh.append(high_freq_energy(filt.decomposition, g_k))
        frob.append(float(np.linalg.norm(g_k)))
    return LayerTrace(
        config=config,
        filter_kind=filt.kind,
        outputs=outputs,
        eh_per_layer=eh,
        frob_per_layer=frob,
        weight_norms=[float(np.linalg.norm(w)) for w in weights],
        coordinates="conjugated" if filt.conjugated else "standard",
    )
