"""Command-line entry point: ``tritter-qcrb run|figure|selftest``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (including
a failed selftest), 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ENGINES, parse_config
from .errors import ConfigError, NumericalError
from .output import emit_csv, emit_plot
from .sweep import PRESET_ORDINATE, PRESETS, default_jobs, figure_preset, run_configs

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _jobs(value: str) -> int:
    jobs = int(value)
    if jobs < 1:
        raise argparse.ArgumentTypeError("--jobs must be >= 1")
    return jobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tritter-qcrb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_flags(p):
        p.add_argument("--engine", choices=ENGINES, help="override the configured engine")
        p.add_argument("--jobs", type=_jobs, help="worker processes (default: $TRITTER_QCRB_JOBS or CPU count)")
        p.add_argument("--plot", action="store_true", help="also write an SVG next to each CSV")

    run = sub.add_parser("run", help="run one scenario config file")
    run.add_argument("config", type=Path)
    run.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    sweep_flags(run)

    fig = sub.add_parser("figure", help="run a figure preset")
    fig.add_argument("preset", choices=sorted(PRESETS))
    fig.add_argument("--out", type=Path, required=True, help="output directory")
    sweep_flags(fig)

    sub.add_parser("selftest", help="run the acceptance criteria")
    return parser


def _run(args) -> int:
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    cfg = parse_config(text, tag=args.config.stem).with_overrides(engine=args.engine)
    rows = run_configs([cfg], args.jobs or default_jobs())
    if args.out is None:
        emit_csv(rows, sys.stdout)
        return EXIT_OK
    emit_csv(rows, args.out)
    if args.plot:
        emit_plot(rows, args.out.with_suffix(".svg"), title=args.config.stem)
    return EXIT_OK


def _figure(args) -> int:
    configs = [c.with_overrides(engine=args.engine) for c in figure_preset(args.preset)]
    rows = run_configs(configs, args.jobs or default_jobs())
    args.out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, args.out / f"{args.preset}.csv")
    if args.plot:
        emit_plot(rows, args.out / f"{args.preset}.svg", ordinate=PRESET_ORDINATE[args.preset], title=args.preset)
    return EXIT_OK


def _selftest(args) -> int:
    from .acceptance import run_all

    results = run_all()
    failed = [r.key for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_NUMERIC if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _run, "figure": _figure, "selftest": _selftest}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
