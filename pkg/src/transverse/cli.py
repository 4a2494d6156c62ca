"""Command-line front end.

Verbs:
  run <scenario.json>   execute one scenario, print the report JSON
  corpus <dir>          execute every scenario in a directory, print a table
  hilbert <nmax>        dimension-scaling CSV for the cube-versus-ray family

Exit status: 0 on a clean run, 1 when any analysis reported a DISCREPANCY,
2 on configuration errors (bad flags, malformed scenario files, bad paths).
Reports land in --out when given, else in $TRANSVERSE_OUT_DIR when set, else
only on stdout.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import PreconditionError, ScenarioFormatError, ToolkitError
from .scenario import (
    REPORT_VERSION,
    dump_report,
    hilbert_cube_scaling,
    run_corpus,
    run_scenario,
)

EXIT_OK = 0
EXIT_DISCREPANCY = 1
EXIT_CONFIG = 2


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None,
                   help="output directory for report files "
                        "(default: $TRANSVERSE_OUT_DIR, else stdout only)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    p.add_argument("--budget", type=int, default=None,
                   help="override the scenario sample budget")
    p.add_argument("--tol", type=float, default=None,
                   help="override the scenario tolerance")
    p.add_argument("--format", default=REPORT_VERSION, dest="fmt",
                   help="report schema version to emit (only %(default)r)")
    p.add_argument("--timings", action="store_true",
                   help="record wall-clock timings (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transverse",
        description="set-transversality analysis runner",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a single scenario file")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    _common_flags(p_run)

    p_corpus = sub.add_parser("corpus", help="run every scenario in a directory")
    p_corpus.add_argument("directory", help="directory of scenario JSON files")
    p_corpus.add_argument("--workers", type=int, default=None,
                          help="thread pool size (default: min(8, files))")
    _common_flags(p_corpus)

    p_hil = sub.add_parser("hilbert",
                           help="cube-versus-ray constant growth up to nmax")
    p_hil.add_argument("nmax", type=int, help="largest dimension to probe")
    p_hil.add_argument("--out", default=None,
                       help="directory for hilbert_scaling.csv")
    p_hil.add_argument("--seed", type=int, default=0)
    p_hil.add_argument("--budget", type=int, default=160)
    return parser


def _resolve_out(arg_out):
    if arg_out:
        return arg_out
    env = os.environ.get("TRANSVERSE_OUT_DIR")
    return env if env else None


def _check_format(fmt: str) -> None:
    if fmt != REPORT_VERSION:
        raise ScenarioFormatError(
            f"unsupported report format {fmt!r}; this build emits {REPORT_VERSION!r}")


def _cmd_run(args) -> int:
    _check_format(args.fmt)
    out_dir = _resolve_out(args.out)
    report = run_scenario(
        args.scenario, out_dir, seed=args.seed, budget=args.budget,
        tol=args.tol, timings=args.timings,
    )
    sys.stdout.write(dump_report(report))
    return EXIT_DISCREPANCY if report["discrepancies"] else EXIT_OK


def _cmd_corpus(args) -> int:
    _check_format(args.fmt)
    if args.workers is not None and args.workers < 1:
        raise ScenarioFormatError("--workers must be at least 1")
    out_dir = _resolve_out(args.out)
    res = run_corpus(
        args.directory, out_dir, workers=args.workers, seed=args.seed,
        budget=args.budget, tol=args.tol, timings=args.timings,
    )
    print(res["table"])
    return EXIT_DISCREPANCY if res["any_discrepancy"] else EXIT_OK


def _cmd_hilbert(args) -> int:
    res = hilbert_cube_scaling(args.nmax, budget=args.budget, seed=args.seed)
    sys.stdout.write(res["csv"])
    out_dir = _resolve_out(args.out)
    if out_dir is not None:
        from pathlib import Path

        from .scenario import _write_atomic

        _write_atomic(Path(out_dir) / "hilbert_scaling.csv", res["csv"])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "corpus": _cmd_corpus, "hilbert": _cmd_hilbert}
    try:
        return handlers[args.verb](args)
    except (ScenarioFormatError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
