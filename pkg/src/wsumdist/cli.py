"""Command line interface for the experiment sweeps and the check suite.

Subcommands: example, markov, nb, check, demo-intro, fit.  Every run is
driven by an ExperimentConfig assembled from built-in defaults, then an
optional --config JSON file, then explicit flags (later layers win).
Sweeps print a readable table by default or the full JSON payload with
--json, and write the complete CSV table to --out; repeated runs with the
same config and seed produce byte-identical CSV and JSON.

Exit codes: 0 on success, 2 when the check suite reports failures, 3 when
a computation trips the support-size resource guard.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from .checks import run_check
from .harness import (
    DegenerateFitError,
    ExperimentConfig,
    SweepResult,
    demo_intro,
    fit_rate,
    json_text,
    run_example,
    run_markov,
    run_nb,
    write_csv,
)
from .weighted import ResourceLimitError

_DEFAULTS: dict[str, dict] = {
    "example": {
        "kind": "example",
        "n_grid": [16, 64, 256, 1024],
        "weights": [1.0, 2.0**0.5],
        "s": 3,
        "tail_tol": 1e-10,
    },
    "markov": {
        "kind": "markov-sweep",
        "n_grid": [50, 100, 200, 400],
        "chains": [[0.3, 0.02]],
        "weights": [1.0],
        "k0": 2,
        "tail_tol": 1e-10,
    },
    "nb": {
        "kind": "nb-sweep",
        "n_grid": [25, 100, 400, 1600],
        "tail_tol": 1e-13,
    },
    "check": {
        "kind": "check",
        "seed": 1,
        "count": 200,
    },
    "demo-intro": {
        "kind": "demo-intro",
        "n_grid": [4, 16, 64, 256],
        "tail_tol": 1e-10,
    },
}


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n-grid {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsumdist",
        description=(
            "Exact distributions of weighted integer sums, matched-moment "
            "approximants, and structural error-bound sweeps."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of ExperimentConfig fields")
    common.add_argument("--out", help="write the full CSV table to this path")
    common.add_argument("--seed", type=int, help="master seed for randomized runs")
    common.add_argument(
        "--n-grid", type=_parse_grid, dest="n_grid", help="comma-separated counts"
    )
    common.add_argument(
        "--tail-tol", type=float, dest="tail_tol", help="series truncation budget"
    )
    common.add_argument(
        "--json", action="store_true", help="print the JSON payload instead of text"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "example",
        parents=[common],
        help="matched two-weight sweep: distance vs structural factor",
    )
    sub.add_parser(
        "markov",
        parents=[common],
        help="Markov-Binomial vs signed compound-geometric sweep",
    )
    sub.add_parser(
        "nb",
        parents=[common],
        help="negative binomial matching sweep",
    )
    sub.add_parser(
        "check",
        parents=[common],
        help="seeded random-instance inequality suite",
    )
    sub.add_parser(
        "demo-intro",
        parents=[common],
        help="two Poisson-plus-coin laws drifting together",
    )
    fit = sub.add_parser(
        "fit", parents=[common], help="log-log rate fit of a sweep CSV"
    )
    fit.add_argument("csv_path", help="CSV with an n column and a value column")
    fit.add_argument(
        "--column",
        default="distance",
        help="value column to fit against n (default: distance)",
    )
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    payload = dict(_DEFAULTS[args.command])
    if args.config:
        with open(args.config) as fh:
            file_payload = json.load(fh)
        if not isinstance(file_payload, dict):
            raise ValueError("config file must hold a JSON object")
        payload.update(file_payload)
    cfg = ExperimentConfig.from_json_dict(payload)
    return cfg.override(
        n_grid=args.n_grid,
        seed=args.seed,
        tail_tol=args.tail_tol,
        out=args.out,
    )


def _emit_sweep(result: SweepResult, cfg: ExperimentConfig, as_json: bool) -> None:
    if as_json:
        payload = {"config": cfg.to_json_dict(), "result": result.to_json_dict()}
        sys.stdout.write(json_text(payload))
    else:
        sys.stdout.write(result.to_text())
    if cfg.out:
        write_csv(result, cfg.out)


def _run_fit(args: argparse.Namespace) -> int:
    with open(args.csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows or "n" not in rows[0] or args.column not in rows[0]:
        sys.stderr.write(
            f"fit: {args.csv_path} needs columns 'n' and {args.column!r}\n"
        )
        return 1
    points = [(float(row["n"]), float(row[args.column])) for row in rows]
    try:
        fit = fit_rate(points)
    except DegenerateFitError as exc:
        sys.stderr.write(f"fit: {exc}\n")
        return 1
    if args.json:
        sys.stdout.write(json_text(fit.to_json_dict()))
    else:
        sys.stdout.write(
            f"slope {fit.slope!r}\nintercept {fit.intercept!r}\n"
            f"residual {fit.residual!r}\n"
        )
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("slope,intercept,residual\n")
            fh.write(f"{fit.slope!r},{fit.intercept!r},{fit.residual!r}\n")
    return 0


def _run_check_cmd(cfg: ExperimentConfig, as_json: bool) -> int:
    report = run_check(cfg.seed, cfg.count)
    if as_json:
        sys.stdout.write(json_text(report.to_json_dict()))
    else:
        for res in report.results:
            sys.stdout.write(f"{res.name}: passed {res.passed} failed {res.failed}\n")
            for failure in res.failures:
                sys.stdout.write(f"  failure: {failure}\n")
        sys.stdout.write("ok\n" if report.ok else "FAILED\n")
    if cfg.out:
        lines = ["name,passed,failed"]
        lines += [f"{r.name},{r.passed},{r.failed}" for r in report.results]
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0 if report.ok else 2


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fit":
            return _run_fit(args)
        cfg = _load_config(args)
        if args.command == "check":
            return _run_check_cmd(cfg, args.json)
        if args.command == "example":
            result = run_example(
                cfg.n_grid,
                weights=cfg.weights,
                s=cfg.s,
                equal_sizes=cfg.kind == "iid-sweep",
            )
        elif args.command == "markov":
            result = run_markov(cfg)
        elif args.command == "nb":
            result = run_nb(cfg.n_grid, tail_tol=cfg.tail_tol)
        else:
            result = demo_intro(cfg.n_grid, tail_tol=cfg.tail_tol)
        _emit_sweep(result, cfg, args.json)
        return 0
    except ResourceLimitError as exc:
        sys.stderr.write(f"resource guard: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
