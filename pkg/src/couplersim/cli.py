"""Command-line entry point: run, list, and verify experiment bundles.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure (non-finite results, failed fits, or a failed verification).
"""

from __future__ import annotations

import argparse
import sys

from .pipelines import (
    ConfigError,
    NumericalError,
    load_config,
    pipeline_listing,
    run_config,
    verify_bundle,
    write_bundle,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="couplersim",
        description="Config-driven sweeps for the driven-resonator coupler "
                    "model; results are written as CSV/JSON bundles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a pipeline config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--workers", type=int, default=1,
                       help="parallel sweep workers (default 1)")
    p_run.add_argument("--out", default=None,
                       help="output root (overrides the config's 'output')")

    sub.add_parser("list", help="list available pipelines")

    p_verify = sub.add_parser("verify", help="re-audit a written bundle")
    p_verify.add_argument("bundle_dir", help="path to a bundle directory")

    return parser


def _cmd_run(args) -> int:
    raw = load_config(args.config)
    try:
        bundle = run_config(raw, workers=max(1, args.workers))
    except (ConfigError, NumericalError):
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    except (ArithmeticError, RuntimeError) as exc:
        raise NumericalError(str(exc)) from exc
    bundle_dir = write_bundle(bundle, args.out)
    print(f"wrote {bundle_dir}")
    for entry in bundle.checks:
        state = "pass" if entry["passed"] else "FAIL"
        print(f"  check {entry['name']}: {state} "
              f"(measured={entry['measured']}, oracle={entry['oracle']}, "
              f"tol={entry['tolerance']})")
    if not bundle.passed:
        print("one or more inline checks failed (bundle status: partial)")
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_verify(args) -> int:
    ok, report = verify_bundle(args.bundle_dir)
    print("\n".join(report))
    return EXIT_OK if ok else EXIT_NUMERICAL


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage already; normalize anything else
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            print(pipeline_listing())
            return EXIT_OK
        if args.command == "verify":
            return _cmd_verify(args)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
