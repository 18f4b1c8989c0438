"""Command-line entry point: ``gamow-decay <subcommand> [options]``.

Exit status is 0 on success, 1 on a numerical error (or a failed
acceptance criterion in ``report``) and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import acceptance, emit, workflow
from .config import RunConfig, load_config, with_overrides
from .errors import ConfigError, DecayError

SUBCOMMANDS = ("poles", "sumrules", "probabilities", "tailfit", "oracle-compare", "report")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--lambda", dest="lambda_", type=float, help="shell strength")
    common.add_argument("--R", dest="R", type=float, help="shell radius")
    common.add_argument("--mode", type=int, help="box mode of the initial state")
    common.add_argument("--N", dest="N", type=int, help="truncation (pole pairs kept)")
    common.add_argument("--t-min", type=float)
    common.add_argument("--t-max", type=float)
    common.add_argument("--points-per-decade", type=int)
    common.add_argument("--probe", nargs=2, type=float, action="append", metavar=("R1", "R2"),
                        help="interior probe pair (repeatable)")
    common.add_argument("--no-tail-closure", action="store_true",
                        help="use the raw truncated sums")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--precision", type=int, help="significant digits")
    common.add_argument("-o", "--output", help="output path, '-' for stdout")

    parser = argparse.ArgumentParser(prog="gamow-decay",
                                     description="Resonant-state expansion of delta-shell decay.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("poles", parents=[common], help="resonance poles")
    sub.add_parser("sumrules", parents=[common], help="sum rule, f and Delta diagnostics")
    sub.add_parser("probabilities", parents=[common], help="S(t), P(t) and the Green remainder")
    tf = sub.add_parser("tailfit", parents=[common], help="late-time log-log slopes")
    tf.add_argument("--series", choices=("S", "P", "green"), help="report one series only")
    sub.add_parser("oracle-compare", parents=[common], help="Crank-Nicolson cross-check")
    sub.add_parser("report", parents=[common], help="run every acceptance criterion")
    return parser


def effective_config(args) -> RunConfig:
    cfg = load_config(args.config)
    overrides = {
        "model.lambda": args.lambda_,
        "model.R": args.R,
        "initial_state.mode": args.mode,
        "truncation_N": args.N,
        "time_grid.t_min": args.t_min,
        "time_grid.t_max": args.t_max,
        "time_grid.points_per_decade": args.points_per_decade,
        "probes": [list(p) for p in args.probe] if args.probe else None,
        "tail_closure": False if args.no_tail_closure else None,
        "output.format": args.format,
        "output.precision": args.precision,
        "output.path": args.output,
    }
    if args.N is not None:
        # keep the diagnostic list consistent with a smaller truncation
        kept = [n for n in cfg.diagnostic_N if n <= args.N]
        overrides["diagnostic_N"] = kept if args.N in kept else kept + [args.N]
    return with_overrides(cfg, overrides)


def produce(subcommand: str, cfg: RunConfig, args) -> tuple[str, int]:
    if subcommand == "poles":
        return emit.render_table(cfg, "poles", *emit.poles_table(workflow.pole_table(cfg))), 0
    if subcommand == "report":
        results = acceptance.run_all(cfg)
        extra = acceptance.supplementary(acceptance.Context(cfg))
        for c in results:
            print(c.line(), file=sys.stderr)
        text = emit.json_text(cfg, "report", acceptance.summary(results, extra))
        return text, 0 if all(c.passed for c in results) else 1
    setup = workflow.build_setup(cfg)
    if subcommand == "sumrules":
        table = emit.sumrules_table(workflow.diagnostics(setup))
        return emit.render_table(cfg, "sumrules", *table), 0
    if subcommand == "probabilities":
        table = emit.probabilities_table(workflow.series(setup))
        return emit.render_table(cfg, "probabilities", *table), 0
    if subcommand == "tailfit":
        fits = workflow.slope_fits(workflow.series(setup))
        return emit.tailfit_text(cfg, fits, getattr(args, "series", None)), 0
    if subcommand == "oracle-compare":
        table = emit.oracle_table(workflow.oracle_compare(setup))
        return emit.render_table(cfg, "oracle-compare", *table), 0
    raise ConfigError(f"unknown subcommand {subcommand}")


def write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        text, status = produce(args.subcommand, cfg, args)
        write(text, cfg.output.path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DecayError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
