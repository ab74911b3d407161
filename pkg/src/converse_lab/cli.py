"""Command line entry point ``converse-lab``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConverseLabError, PreconditionViolated, SchemaViolation, UnknownExperiment
from .experiments import EXPERIMENTS, load_config, run_experiment

__all__ = ["main"]

EXIT_OK, EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_OTHER = 0, 2, 3, 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="converse-lab", description="Run config-driven converse-bound experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment and write its CSV")
    run.add_argument("config", type=Path)
    sub.add_parser("list-experiments", help="list registered experiments")
    val = sub.add_parser("validate", help="check a config against its schema")
    val.add_argument("config", type=Path)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-experiments":
            for name, exp in EXPERIMENTS.items():
                print(f"{name}\t{exp.description}")
            return EXIT_OK
        config = load_config(args.config)
        if args.command == "validate":
            print(f"ok: {config.experiment} ({len(config.parameters)} parameters, seed {config.seed})")
            return EXIT_OK
        out, record = run_experiment(config)
        print(f"wrote {record['rows']} rows to {out}")
        return EXIT_OK
    except UnknownExperiment as exc:
        print(f"error: unknown experiment {exc.args[0]!r}; see list-experiments", file=sys.stderr)
        return EXIT_SCHEMA
    except SchemaViolation as exc:
        print(f"error: schema violation at {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PreconditionViolated as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ConverseLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
