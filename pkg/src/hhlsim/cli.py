"""Command-line benchmark runner.

Subcommands:
  sweep <config.json>              run a benchmark sweep (CLI flags override config)
  eq3 [--repeats --shots --seed]   the bundled 2x2 shot-histogram experiment
  plot <dir>                       render SVG charts from the CSVs in a directory
  solve <problem.json> <config.json>   one-off solve, result JSON on stdout

The default output directory is taken from $HHLSIM_OUTPUT_DIR when a command
does not pass --output-dir. Exit codes: 0 success, 2 configuration error,
1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import HhlSimError
from .pipeline import config_from_json, result_to_json, run_hhl
from .plots import emit_plots
from .linalg import problem_from_json
from .sweep import run_eq3_experiment, run_sweep, sweep_config_from_json

OUTPUT_DIR_ENV = "HHLSIM_OUTPUT_DIR"


def _default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "hhlsim-out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhlsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a families x sizes x methods sweep")
    p_sweep.add_argument("config", type=Path, help="sweep config JSON document")
    p_sweep.add_argument("--output-dir", default=None)
    p_sweep.add_argument("--repeats", type=int, default=None)
    p_sweep.add_argument("--shots", type=int, default=None)
    p_sweep.add_argument("--base-seed", type=int, default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--max-qubits", type=int, default=None)
    p_sweep.add_argument("--timing", action="store_true", default=None,
                         help="record wall-clock per instance (breaks byte-determinism)")

    p_eq3 = sub.add_parser("eq3", help="run the 2x2 demo shot experiment")
    p_eq3.add_argument("--repeats", type=int, default=50)
    p_eq3.add_argument("--shots", type=int, default=10_000)
    p_eq3.add_argument("--seed", type=int, default=0)
    p_eq3.add_argument("--output-dir", default=None)

    p_plot = sub.add_parser("plot", help="emit SVG charts from CSV outputs")
    p_plot.add_argument("directory", type=Path)
    p_plot.add_argument("--output-dir", default=None)

    p_solve = sub.add_parser("solve", help="solve one problem/config pair")
    p_solve.add_argument("problem", type=Path, help="problem JSON (matrix + rhs)")
    p_solve.add_argument("config", type=Path, help="run config JSON")
    return parser


def _cmd_sweep(args: argparse.Namespace) -> int:
    with args.config.open() as fh:
        config = sweep_config_from_json(json.load(fh))
    overrides = {
        "output_dir": args.output_dir,
        "repeats": args.repeats,
        "shots": args.shots,
        "base_seed": args.base_seed,
        "workers": args.workers,
        "max_qubits": args.max_qubits,
        "timing": args.timing,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    if not config.output_dir:
        config.output_dir = _default_output_dir()
    rows_path, summary_path = run_sweep(config)
    print(f"rows:    {rows_path}")
    print(f"summary: {summary_path}")
    return 0


def _cmd_eq3(args: argparse.Namespace) -> int:
    out = args.output_dir or _default_output_dir()
    summary = run_eq3_experiment(
        out, repeats=args.repeats, shots=args.shots, seed=args.seed
    )
    print(f"counts:  {summary.counts_csv}")
    print(f"ratios:  {summary.ratios_csv}")
    print(
        f"mean probabilities: ({summary.mean_p0:.4f}, {summary.mean_p1:.4f})  "
        f"mean ratio: {summary.mean_ratio:.3f}"
    )
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    written = emit_plots(str(args.directory), args.output_dir)
    for path in written:
        print(path)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    with args.problem.open() as fh:
        problem = problem_from_json(json.load(fh))
    with args.config.open() as fh:
        config = config_from_json(json.load(fh))
    result = run_hhl(problem, config)
    json.dump(result_to_json(result), sys.stdout, indent=2)
    print()
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "eq3": _cmd_eq3,
        "plot": _cmd_plot,
        "solve": _cmd_solve,
    }
    try:
        return handlers[args.command](args)
    except (HhlSimError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
