"""Command-line interface.

Subcommands: verify (inequality sweep, one JSON report per check),
decay / surgery / skip (experiment reproductions emitting CSV files and,
with --svg, matplotlib figures). Exit codes: 0 success, 1 when a
verification report is violated, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, GraphSmoothError
from .experiments import (
    ExperimentConfig,
    header_lines,
    run_decay,
    run_skip,
    run_surgery,
    run_verify,
    write_csv,
    write_trace_csv,
)

log = logging.getLogger("graphsmooth")


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument("--jobs", type=int, help="worker processes for trial sweeps")
    parser.add_argument("--out-dir", help="output directory (default: out)")
    parser.add_argument("--svg", action="store_true", default=None,
                        help="render figures alongside the CSV output")


def _add_experiment_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--profile", choices=("desk", "paper"), default="desk",
                        help="desk runs in minutes; paper reproduces full scale")
    parser.add_argument("--nodes", type=int, dest="num_nodes", help="graph size N")
    parser.add_argument("--trials", type=int, help="number of trials")
    parser.add_argument("--depth", type=int, help="number of layers K")
    parser.add_argument("--p", type=float, dest="p_intra", help="within-class edge probability")
    parser.add_argument("--q", type=float, dest="q_inter", help="between-class edge probability")
    parser.add_argument("--sigma", type=float, dest="noise_std", help="feature noise scale")
    parser.add_argument("--alpha", type=float, help="filter step size")
    parser.add_argument("--weight-frobenius", type=float, help="weight matrix Frobenius norm")
    parser.add_argument("--weight-mode", choices=("experiment", "theorem"),
                        help="experiment: ||W||_F as configured; theorem: ||W||_F = 1")
    parser.add_argument("--dump-traces", action="store_true", default=None,
                        help="write one per-trial trace CSV per filter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphsmooth",
        description="Spectral smoothness bounds and over-smoothing experiments on graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run every inequality check and write JSON reports")
    _add_common(p_verify)
    p_verify.add_argument("--instances", type=int, help="number of random instances (default 50)")
    p_verify.add_argument(
        "--corrupt-constant",
        action="append",
        default=None,
        metavar="NAME=SCALE",
        help="test hook: scale a named constant (Cr, CrPrime), e.g. Cr=0.5",
    )

    for name, help_text in (
        ("decay", "per-layer high-frequency energy decay for classical filters"),
        ("surgery", "energy decay across spectrally flattened filters"),
        ("skip", "skip-connection variants: depth table and direction histogram"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        _add_experiment_flags(p)
    return parser


def _load_config(args, experiment: str) -> ExperimentConfig:
    data = {}
    if args.config:
        raw = Path(args.config).read_text()
        data = json.loads(raw)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    data.setdefault("experiment", experiment)
    if data["experiment"] not in (experiment, "histogram"):
        raise ConfigError(
            f"config experiment {data['experiment']!r} does not match subcommand {experiment!r}"
        )
    profile = getattr(args, "profile", "desk")
    overrides = {}
    for key in (
        "seed", "jobs", "out_dir", "svg", "num_nodes", "trials", "depth",
        "p_intra", "q_inter", "noise_std", "alpha", "weight_frobenius",
        "weight_mode", "dump_traces", "instances",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    corrupt = getattr(args, "corrupt_constant", None)
    if corrupt:
        parsed = {}
        for item in corrupt:
            if "=" not in item:
                raise ConfigError(f"--corrupt-constant expects NAME=SCALE, got {item!r}")
            name, _, scale = item.partition("=")
            if name not in ("Cr", "CrPrime"):
                raise ConfigError(f"unknown constant {name!r} (use Cr or CrPrime)")
            parsed[name] = float(scale)
        overrides["corrupt_constants"] = parsed
    data.update(overrides)
    experiment_name = data.pop("experiment")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"experiment"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig.create(experiment_name, profile=profile, **data)


def _prepare_out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(args) -> int:
    cfg = _load_config(args, "verify")
    out = _prepare_out_dir(cfg)
    reports = run_verify(cfg)
    any_violated = False
    for report in reports:
        payload = report.to_dict()
        payload["meta"] = {
            "version": __version__,
            "config": cfg.to_dict(),
            "seed": cfg.seed,
        }
        path = out / f"verify_{report.name}.json"
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        status = "VIOLATED" if report.violated else ("n/a" if not report.applicable else "ok")
        print(
            f"{report.name}: {report.instances} records, "
            f"worst margin {report.worst_margin:.3e}, {status}"
        )
        any_violated = any_violated or report.violated
    print(f"wrote {len(reports)} reports to {out}")
    return 1 if any_violated else 0


def _dump_traces(cfg, out, items, name_fn) -> None:
    """Write one per-layer trace CSV per (trial, filter-or-variant) pair."""
    tdir = out / "traces"
    tdir.mkdir(parents=True, exist_ok=True)
    count = 0
    for trial, traces in items:
        for key, trace in traces.items():
            write_trace_csv(trace, tdir / name_fn(key, trial), header_lines(cfg, {"trial": trial}))
            count += 1
    print(f"wrote {count} trace files to {tdir}")


def cmd_decay(args) -> int:
    cfg = _load_config(args, "decay")
    out = _prepare_out_dir(cfg)
    result = run_decay(cfg)
    extra = {"redraws": result["redraws"]}
    combined = []
    for kind, data in result["filters"].items():
        rows = [
            (k, float(m), float(s), result["trials"])
            for k, (m, s) in enumerate(zip(data["mean"], data["stderr"]))
        ]
        write_csv(
            out / f"decay_{kind}.csv",
            header_lines(cfg, extra),
            ["layer", "mean_ln_Eh", "stderr_ln_Eh", "trials"],
            rows,
        )
        combined.extend((kind,) + row for row in rows)
        slope, _, r2 = data["fit"]
        print(f"{kind}: slope {slope:.4f} per layer, R^2 {r2:.4f}")
    write_csv(
        out / "decay_combined.csv",
        header_lines(cfg, extra),
        ["filter", "layer", "mean_ln_Eh", "stderr_ln_Eh", "trials"],
        combined,
    )
    if cfg.dump_traces:
        _dump_traces(cfg, out, result["per_trial"], lambda kind, t: f"decay_{kind}_trial{t:04d}.csv")
    if cfg.svg:
        from .plotting import render_decay

        render_decay(result["filters"], out / "decay.svg")
    print(f"wrote decay output to {out}")
    return 0


def cmd_surgery(args) -> int:
    cfg = _load_config(args, "surgery")
    out = _prepare_out_dir(cfg)
    result = run_surgery(cfg)
    extra = {"redraws": result["redraws"]}
    combined = []
    for a, data in result["values"].items():
        rows = [
            (k, float(m), float(s), result["trials"])
            for k, (m, s) in enumerate(zip(data["mean"], data["stderr"]))
        ]
        write_csv(
            out / f"surgery_a{a:g}.csv",
            header_lines(cfg, extra),
            ["layer", "mean_ln_Eh", "stderr_ln_Eh", "trials"],
            rows,
        )
        combined.extend((float(a),) + row for row in rows)
    write_csv(
        out / "surgery_combined.csv",
        header_lines(cfg, extra),
        ["a", "layer", "mean_ln_Eh", "stderr_ln_Eh", "trials"],
        combined,
    )
    if cfg.dump_traces:
        _dump_traces(cfg, out, result["per_trial"], lambda a, t: f"surgery_a{a:g}_trial{t:04d}.csv")
    if cfg.svg:
        from .plotting import render_surgery

        render_surgery(result["values"], out / "surgery.svg")
    print(f"wrote surgery output to {out}")
    return 0


def cmd_skip(args) -> int:
    cfg = _load_config(args, "skip")
    out = _prepare_out_dir(cfg)
    result = run_skip(cfg)
    extra = {"redraws": result["redraws"]}
    if result["degenerate_clusters"]:
        extra["note"] = "per-direction energies basis-dependent inside degenerate eigenvalue clusters"
    histogram_only = cfg.experiment == "histogram"
    if not histogram_only:
        rows = []
        for variant, per_depth in result["table"].items():
            for k in result["depths"]:
                cell = per_depth[k]
                rows.append(
                    (variant, k, cell["median"], cell["mean"], cell["stderr"], result["trials"])
                )
        write_csv(
            out / "skip_table.csv",
            header_lines(cfg, extra),
            ["variant", "depth", "median_ln_Eh", "mean_ln_Eh", "stderr_ln_Eh", "trials"],
            rows,
        )
    hist_rows = []
    for variant, data in result["histogram"].items():
        for i, (m, s) in enumerate(zip(data["mean"], data["stderr"]), start=1):
            hist_rows.append((variant, i, float(m), float(s)))
    write_csv(
        out / "skip_histogram.csv",
        header_lines(cfg, extra),
        ["variant", "direction", "mean_energy", "stderr_energy"],
        hist_rows,
    )
    if cfg.dump_traces:
        items = [(t, payload["traces"]) for t, payload in result["per_trial"]]
        _dump_traces(cfg, out, items, lambda v, t: f"skip_{v}_trial{t:04d}.csv")
    if cfg.svg:
        from .plotting import render_histogram, render_skip_table

        if not histogram_only:
            render_skip_table(result["table"], result["depths"], out / "skip_table.svg")
        render_histogram(result["histogram"], out / "skip_histogram.svg")
    print(f"wrote skip output to {out}")
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "decay": cmd_decay,
    "surgery": cmd_surgery,
    "skip": cmd_skip,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except GraphSmoothError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
