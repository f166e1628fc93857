"""Figure rendering for the experiment commands (SVG files written next
to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams.update({"figure.figsize": (7.0, 4.5), "font.size": 10})


def render_decay(per_filter: dict, path) -> None:
    """ln E_h against layer index, one errorbar curve per filter."""
    fig, ax = plt.subplots()
    for kind, data in per_filter.items():
        layers = np.arange(len(data["mean"]))
        ax.errorbar(layers, data["mean"], yerr=data["stderr"], label=kind, capsize=2)
    ax.set_xlabel("layer k")
    ax.set_ylabel(r"mean $\ln E_h(F^{(k)})$")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def render_surgery(per_a: dict, path) -> None:
    """ln E_h against layer index, one curve per surgery eigenvalue a."""
    fig, ax = plt.subplots()
    for a, data in sorted(per_a.items(), reverse=True):
        layers = np.arange(len(data["mean"]))
        ax.errorbar(layers, data["mean"], yerr=data["stderr"], label=f"a = {a:g}", capsize=2)
    ax.set_xlabel("layer k")
    ax.set_ylabel(r"mean $\ln E_h(F^{(k)})$")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def render_skip_table(table: dict, depths, path) -> None:
    """Median ln E_h of the normalized output against depth, per variant."""
    fig, ax = plt.subplots()
    for variant, rows in table.items():
        ax.plot(depths, [rows[k]["median"] for k in depths], marker="o", label=variant)
    ax.set_xlabel("depth K")
    ax.set_ylabel(r"median $\ln E_h(\tilde F^{(K)})$")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def render_histogram(histogram: dict, path) -> None:
    """Per-direction energy of the normalized deep output, one panel per
    variant."""
    variants = list(histogram)
    fig, axes = plt.subplots(1, len(variants), figsize=(4.0 * len(variants), 3.5), sharey=True)
    if len(variants) == 1:
        axes = [axes]
    for ax, variant in zip(axes, variants):
        mean = histogram[variant]["mean"]
        ax.bar(np.arange(1, len(mean) + 1), mean, width=1.0)
        ax.set_title(variant)
        ax.set_xlabel("direction i")
        ax.set_yscale("log")
    axes[0].set_ylabel(r"mean $E_i(\tilde F^{(K)})$")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
