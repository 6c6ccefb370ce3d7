"""Command-line front end: argument parsing, dispatch, and report emission.

Subcommands: bounds, ib, vqib, ising, fig4.  Values are resolved with the
precedence CLI flag > config-file entry > built-in default; config files
are JSON objects whose keys must all be known to the chosen subcommand.
Every command requires an explicit or default seed (never the wall clock)
and writes its outputs only inside the chosen output directory.

Exit codes: 0 success, 1 runtime or numerical failure, 2 argument errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .experiments import (
    BoundsConfig,
    Fig4Config,
    IBSweepConfig,
    IsingRunConfig,
    MoonsConfig,
    run_bounds,
    run_fig4,
    run_ib_sweep,
    run_ising,
    run_moons_vqib,
)
from .linalg import NumericalError, ValidationError
from .report import emit_report


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation: what to run, where, and how to write it."""

    command: str
    params: object            # the command-specific config dataclass
    seed: int
    output_dir: Path
    format: str
    plot: bool
    threads: int


_COMMANDS = {
    "bounds": (BoundsConfig, run_bounds),
    "ib": (IBSweepConfig, run_ib_sweep),
    "vqib": (MoonsConfig, run_moons_vqib),
    "ising": (IsingRunConfig, run_ising),
    "fig4": (Fig4Config, run_fig4),
}

# CLI flag name -> config dataclass field, per command
_FLAG_FIELDS = {
    "fig4": {"nq_max": "nq_max", "grid": "grid", "mean0": "mean0", "mean1": "mean1",
             "std": "std", "window": "window"},
    "bounds": {"nq": "nq", "grid": "grid", "mean0": "mean0", "mean1": "mean1",
               "std": "std", "window": "window", "train_size": "train_size",
               "delta": "delta_confidence"},
    "ib": {"beta_min": "beta_min", "beta_max": "beta_max", "beta_points": "beta_points",
           "iterations": "iterations", "mode": "mode", "grid": "grid",
           "mean0": "mean0", "mean1": "mean1", "std": "std", "window": "window"},
    "ising": {"L": "length", "grid": "grid", "train_per_phase": "train_per_phase",
              "shots": "shots", "repetitions": "repetitions", "test_grid": "test_grid",
              "h_range": "h_range"},
    "vqib": {"beta": "beta", "layers": "layers", "train_per_class": "train_per_class",
             "test_per_class": "test_per_class", "big_test": "big_test_total",
             "noise": "noise", "max_evals": "max_evals", "restarts": "restarts"},
}


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", type=Path, default=None,
                     help="JSON file of parameter overrides")
    sub.add_argument("--seed", type=int, default=None, help="master RNG seed")
    sub.add_argument("--out", type=Path, default=None, help="output directory")
    sub.add_argument("--format", choices=("csv", "json"), default=None,
                     help="format of the curve tables (default csv)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker threads for parallelizable sweeps (default 1)")
    sub.add_argument("--no-plot", action="store_true",
                     help="skip rendering figures alongside the data files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qembound",
        description="Accuracy and generalization metrics for quantum-embedding classifiers")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fig4", help="angle-encoding risk/bound sweep over copy counts")
    p.add_argument("--nq-max", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--mean0", type=float)
    p.add_argument("--mean1", type=float)
    p.add_argument("--std", type=float)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    _add_common(p)

    p = subs.add_parser("bounds", help="risk report for one angle encoding")
    p.add_argument("--nq", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--mean0", type=float)
    p.add_argument("--mean1", type=float)
    p.add_argument("--std", type=float)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--train-size", type=int)
    p.add_argument("--delta", type=float, help="confidence level of the budget")
    _add_common(p)

    p = subs.add_parser("ib", help="information-bottleneck sweep over beta")
    p.add_argument("--beta-min", type=float)
    p.add_argument("--beta-max", type=float)
    p.add_argument("--beta-points", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--mode", choices=("pure", "mixed"))
    p.add_argument("--grid", type=int)
    p.add_argument("--mean0", type=float)
    p.add_argument("--mean1", type=float)
    p.add_argument("--std", type=float)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    _add_common(p)

    p = subs.add_parser("ising", help="Ising phase-recognition experiment")
    p.add_argument("--L", type=int, help="chain length (even)")
    p.add_argument("--grid", type=int, help="field grid for the kernel bound")
    p.add_argument("--train-per-phase", type=int)
    p.add_argument("--shots", type=str, help="comma-separated shot counts, e.g. 1,10,100")
    p.add_argument("--repetitions", type=int)
    p.add_argument("--test-grid", type=int)
    p.add_argument("--h-range", type=float, nargs=2, metavar=("LO", "HI"))
    _add_common(p)

    p = subs.add_parser("vqib", help="variational IB training on 2-moons")
    p.add_argument("--beta", type=float)
    p.add_argument("--layers", type=int)
    p.add_argument("--train-per-class", type=int)
    p.add_argument("--test-per-class", type=int)
    p.add_argument("--big-test", type=int)
    p.add_argument("--noise", type=float)
    p.add_argument("--max-evals", type=int)
    p.add_argument("--restarts", type=int)
    _add_common(p)

    return parser


class UsageError(Exception):
    pass


def _coerce(value, template):
    if isinstance(template, tuple):
        kind = type(template[0]) if template else float
        return tuple(kind(v) for v in value)
    if isinstance(template, bool):
        return bool(value)
    return type(template)(value)


def _resolve_params(command: str, args: argparse.Namespace):
    cfg_cls, _ = _COMMANDS[command]
    values = {f.name: f.default for f in dataclasses.fields(cfg_cls)}
    flag_map = _FLAG_FIELDS[command]
    known = set(values) | {"seed", "out", "format", "threads", "plot"}

    if args.config is not None:
        try:
            overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        if not isinstance(overrides, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in overrides.items():
            if key not in known:
                raise UsageError(f"unknown config key {key!r} for command {command!r}")
        file_level = {k: v for k, v in overrides.items() if k in values}
    else:
        overrides, file_level = {}, {}

    for key, val in file_level.items():
        values[key] = _coerce(val, values[key]) if values[key] is not None else val

    for flag, field_name in flag_map.items():
        raw = getattr(args, flag, None)
        if raw is None:
            continue
        if field_name == "shots":
            raw = tuple(int(s) for s in str(raw).split(","))
        values[field_name] = _coerce(raw, values[field_name])

    seed = args.seed if args.seed is not None else overrides.get("seed")
    if seed is None:
        seed = values.get("seed", 7)
    values["seed"] = int(seed)

    if "threads" in values:
        values["threads"] = int(args.threads if args.threads is not None
                                else overrides.get("threads", values["threads"]))
    try:
        params = cfg_cls(**values)
    except (ValidationError, TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    out_dir = args.out if args.out is not None else Path(overrides.get("out", f"runs/{command}"))
    fmt = args.format if args.format is not None else overrides.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown format {fmt!r}")
    plot = not args.no_plot and bool(overrides.get("plot", True))
    threads = int(args.threads if args.threads is not None else overrides.get("threads", 1))
    return RunConfig(command=command, params=params, seed=int(seed),
                     output_dir=Path(out_dir), format=fmt, plot=plot, threads=threads)


def parse_and_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        run = _resolve_params(args.command, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run 'qembound {args.command} --help' for usage", file=sys.stderr)
        return 2

    _, driver = _COMMANDS[args.command]
    try:
        result = driver(run.params)
        files = emit_report(result, run.output_dir, fmt=run.format, plot=run.plot)
    except (ValidationError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{run.command}: wrote {len(files)} files to {run.output_dir} "
          f"(seed {run.seed}, {result.runtime:.2f}s)")
    return 0


def main():
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
