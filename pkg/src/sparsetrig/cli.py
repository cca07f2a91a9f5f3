"""Command-line entry points.

Subcommands: ``qtable`` (rank census CSV), ``stirling`` (associated Stirling
table), ``bound`` (failure-bound curves), ``recover`` (solve one instance
from JSON files), ``montecarlo`` (phase-transition experiment).  Exit codes:
0 success, 2 invalid arguments or configuration, 3 capacity rejection.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds, harness, model, partitions, solver

__all__ = ["main"]


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_qtable(args) -> int:
    if args.star:
        if args.K is None or args.m is None:
            raise ValueError("--star requires --K and --m")
        census = partitions.grid_rank_census(args.K, args.m, workers=args.threads)
    else:
        if args.n is None:
            raise ValueError("--n is required without --star")
        census = partitions.rank_census(args.n, workers=args.threads)
    _write_output(census.to_csv(), args.out)
    return 0


def _cmd_stirling(args) -> int:
    lines = ["n,k,value"]
    for n in range(2, args.max_n + 1):
        for k in range(1, n // 2 + 1):
            lines.append(f"{n},{k},{bounds.assoc_stirling2(n, k)}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _parse_range(spec: str) -> list[int]:
    parts = [int(x) for x in spec.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) == 2:
        start, stop = parts
        return list(range(start, stop + 1))
    start, stop, step = parts
    return list(range(start, stop + 1, step))


def _cmd_bound(args) -> int:
    orders = [int(x) for x in args.orders.split(",")] if args.orders else None
    sample_counts = _parse_range(args.samples)
    size = args.sparsity if args.theorem == 1 else args.expected_support
    if size is None:
        raise ValueError(
            "--sparsity is required for theorem 1, --expected-support for theorem 2"
        )
    text = harness.emit_bound_curves(
        args.theorem, size, args.dimension, sample_counts, orders=orders
    )
    _write_output(text, args.out)
    return 0


def _cmd_recover(args) -> int:
    poly, _ = model.instance_from_json(Path(args.input).read_text())
    if poly is None:
        raise ValueError(f"{args.input} holds no polynomial")
    _, samples = model.instance_from_json(Path(args.samples).read_text())
    if samples is None:
        raise ValueError(f"{args.samples} holds no sampling points")
    grid = poly.grid

    support = poly.sorted_support()
    if support:
        import numpy as np

        rhs = model.fourier_matrix(samples, support) @ np.array(
            [poly.coeffs[k] for k in support]
        )
    else:
        import numpy as np

        rhs = np.zeros(samples.count, dtype=complex)
    problem = solver.BPProblem(
        matrix=model.fourier_matrix(samples, grid.frequencies()), rhs=rhs
    )
    solution = solver.solve_basis_pursuit(problem)
    doc = {"solution": json.loads(solution.to_json())}
    if support:
        certificate = solver.dual_certificate(samples, grid, poly)
        doc["certificate"] = json.loads(certificate.to_json())
    _write_output(json.dumps(doc) + "\n", args.out)
    return 0


def _cmd_montecarlo(args) -> int:
    config = harness.ExperimentConfig.from_json(Path(args.config).read_text())
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, master_seed=args.seed)
    records = harness.run_montecarlo(config, workers=args.threads)
    _write_output(harness.emit_trial_records(records), args.out)
    if args.out is not None:
        echo_path = Path(args.out).with_suffix(".config.json")
        echo_path.write_text(config.to_json() + "\n")
    if args.curve is not None:
        Path(args.curve).write_text(harness.emit_failure_curve(records))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsetrig",
        description="Sparse trigonometric recovery: censuses, bounds, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("qtable", help="exact partition rank census as CSV")
    q.add_argument("--n", type=int, help="element count for the cycle census")
    q.add_argument("--star", action="store_true", help="grid census instead of cycle")
    q.add_argument("--K", type=int, help="grid columns (with --star)")
    q.add_argument("--m", type=int, help="grid rows (with --star)")
    q.add_argument("--out", help="output path (default stdout)")
    q.add_argument("--threads", type=int, default=1)
    q.set_defaults(func=_cmd_qtable)

    s = sub.add_parser("stirling", help="associated Stirling numbers as CSV")
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_stirling)

    b = sub.add_parser("bound", help="failure-probability bound curves as CSV")
    b.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    b.add_argument("--sparsity", type=int, help="sparsity (theorem 1)")
    b.add_argument("--expected-support", type=float, help="mean support size (theorem 2)")
    b.add_argument("--dimension", type=int, required=True)
    b.add_argument("--samples", required=True, help="N range as start:stop[:step]")
    b.add_argument("--orders", help="comma-separated moment orders")
    b.add_argument("--out")
    b.set_defaults(func=_cmd_bound)

    r = sub.add_parser("recover", help="solve one instance from JSON files")
    r.add_argument("--input", required=True, help="polynomial JSON")
    r.add_argument("--samples", required=True, help="sampling-set JSON")
    r.add_argument("--out")
    r.set_defaults(func=_cmd_recover)

    m = sub.add_parser("montecarlo", help="phase-transition experiment from a config")
    m.add_argument("--config", required=True, help="experiment config JSON")
    m.add_argument("--seed", type=int, help="override the config master seed")
    m.add_argument("--out", help="records CSV path (default stdout)")
    m.add_argument("--curve", help="also write the aggregated failure curve here")
    m.add_argument("--threads", type=int, default=1)
    m.set_defaults(func=_cmd_montecarlo)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except partitions.CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
