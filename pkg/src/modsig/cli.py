"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 degenerate partition,
3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .errors import BudgetError, DegenerateError, ModsigError
from .graph import read_graph
from .labeling import ColorDistribution, empirical_distribution, read_labeling
from .mclab import DEFAULT_BUDGET, DEFAULT_X_GRID, SimulationConfig, simulate

EXIT_OK, EXIT_IO, EXIT_DEGENERATE, EXIT_INVALID = 0, 1, 2, 3


def _floats(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {text!r}")


def _distribution(args, lab):
    if args.probs is not None:
        dist = ColorDistribution.from_probs(args.probs)
        if lab is not None and dist.K != lab.K:
            raise ModsigError(f"--probs has {dist.K} entries but the partition has K={lab.K}")
        return dist
    return empirical_distribution(lab)


def _inputs(args, *names):
    return {name: {"path": str(getattr(args, name)), "sha256": report.sha256_file(getattr(args, name))}
            for name in names if getattr(args, name, None)}


def _write(path, text):
    if path:
        Path(path).write_text(text)


def cmd_analyze(args):
    g = read_graph(args.graph)
    lab = read_labeling(args.labels, g)
    rep = report.analysis_report(g, lab, _distribution(args, lab), args.constant_M, args.scale,
                                 _inputs(args, "graph", "labels"))
    sys.stdout.write(report.format_analysis(rep))
    _write(args.json_out, report.dumps(rep))
    return EXIT_OK


def cmd_simulate(args):
    g = read_graph(args.graph)
    if args.labels:
        lab = read_labeling(args.labels, g)
        dist = _distribution(args, lab)
    elif args.probs is not None:
        dist = ColorDistribution.from_probs(args.probs)
    else:
        raise ModsigError("simulate needs --labels or --probs")
    cfg = SimulationConfig(replicates=args.replicates, seed=args.seed, x_grid=args.x_grid,
                           workers=args.workers, scale=args.scale, budget=args.budget)
    summary = simulate(g, dist, cfg)
    sys.stdout.write(report.format_simulation(summary))
    _write(args.json_out, report.dumps(summary.to_dict()))
    _write(args.csv_out, report.tail_csv(summary))
    return EXIT_OK


def cmd_validate(args):
    g = read_graph(args.graph)
    lab = read_labeling(args.labels, g)
    checks = report.validation_checks(g, lab, _distribution(args, lab), seed=args.seed)
    sys.stdout.write(report.format_checks(checks))
    _write(args.json_out, report.dumps({"checks": checks}))
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_INVALID


def cmd_compare(args):
    g = read_graph(args.graph)
    lab_a = read_labeling(args.labels, g)
    lab_b = read_labeling(args.labels_b, g)
    inputs = {"a": _inputs(args, "graph", "labels"), "b": _inputs(args, "graph", "labels_b")}
    rep = report.comparison_report(g, lab_a, lab_b, lambda lab: _distribution(args, lab),
                                   args.constant_M, args.scale, inputs)
    for key in ("a", "b"):
        sys.stdout.write(f"== partition {key} ==\n")
        side = rep[key]
        sys.stdout.write(side["message"] + "\n" if side.get("degenerate")
                         else report.format_analysis(side))
    if rep["partial"]:
        sys.stdout.write("comparison partial: one partition is degenerate\n")
    else:
        sys.stdout.write(f"z_sigma(a) - z_sigma(b) = {rep['z_sigma_difference']:.6g}\n")
    sys.stdout.write(rep["note"] + "\n")
    _write(args.json_out, report.dumps(rep))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modsig",
                                     description="Modularity significance under free labeling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, labels_required=True):
        p.add_argument("--graph", required=True, help="edge-list file")
        p.add_argument("--labels", required=labels_required, help="vertex_id color_id file")
        p.add_argument("--probs", type=_floats, default=None,
                       help="comma-separated null color probabilities (overrides empirical)")
        p.add_argument("--json-out")
        p.add_argument("--scale", choices=("delta", "sigma"), default="delta")
        p.add_argument("--constant-M", type=float, default=1.0, dest="constant_M")

    p = sub.add_parser("analyze", help="score one partition")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte-Carlo check of the null approximation")
    common(p, labels_required=False)
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x-grid", type=_floats, default=DEFAULT_X_GRID, dest="x_grid")
    p.add_argument("--workers", type=int, default=1, help="0 = one per CPU")
    p.add_argument("--csv-out")
    p.add_argument("--budget", type=float, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run the identity and inequality suite")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="score two partitions side by side")
    common(p)
    p.add_argument("--labels-b", required=True, dest="labels_b")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except BudgetError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, ModsigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
