#!/usr/bin/env python3
"""Command line entry point for the half-line oscillator spectral toolkit."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from dotenv import load_dotenv

from classes.commands import run_command
from classes.config import SUPPORTED_FORMATS, AppConfig
from classes.errors import OscispecError
from classes.verification import SUITES

# Ensure OSCISPEC_* variables are available before argument defaults are resolved.
PROJECT_ROOT = Path(__file__).resolve().parent
load_dotenv(PROJECT_ROOT / ".env")


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--potential",
        default=None,
        help="Potential JSON file (looked up in the fixtures directory when not found).",
    )
    parser.add_argument(
        "--boundary",
        default=None,
        help="Boundary condition: dirichlet, neumann or robin:B (default dirichlet).",
    )
    parser.add_argument(
        "--modes",
        type=int,
        default=None,
        help="Number of modes N (overrides OSCISPEC_MODES).",
    )
    parser.add_argument(
        "--order",
        type=int,
        default=None,
        help="Series order / number of Hermite coefficients K (overrides OSCISPEC_ORDER).",
    )
    parser.add_argument(
        "-o",
        "--out",
        default=None,
        help="Destination file; output goes to stdout when omitted.",
    )
    parser.add_argument(
        "--format",
        default=None,
        choices=list(SUPPORTED_FORMATS),
        help="Output format (overrides OSCISPEC_FORMAT).",
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=None,
        help="Convergence tolerance of the inversion (overrides OSCISPEC_TOL).",
    )
    parser.add_argument(
        "--xmax",
        type=float,
        default=None,
        help="Integration cutoff; derived from the largest eigenvalue when omitted.",
    )
    parser.add_argument(
        "--dry-run",
        action="store_true",
        help="Validate the inputs and exit without computing.",
    )
    parser.add_argument(
        "--no-cache",
        action="store_true",
        help="Do not read or write the on-disk spectral cache.",
    )
    parser.add_argument(
        "--cache-dir",
        default=None,
        help="Directory for cached spectral data (overrides OSCISPEC_CACHE_DIR).",
    )
    parser.add_argument(
        "--fixtures",
        default=None,
        help="Fixture directory for relative input paths (overrides OSCISPEC_FIXTURES).",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Log progress to stderr.",
    )


def create_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Spectral data, identity checks, isospectral flows and inversion for the "
        "perturbed harmonic oscillator on the half-line."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    forward = subparsers.add_parser("forward", help="Eigenvalues, norming constants and r-coordinates.")
    _add_common_arguments(forward)

    verify = subparsers.add_parser("verify", help="Run an identity suite; exit 1 if a check fails.")
    _add_common_arguments(verify)
    verify.add_argument(
        "--suite",
        default=None,
        choices=list(SUITES),
        help="Which identities to check (default all).",
    )

    darboux = subparsers.add_parser("darboux", help="Shift one norming constant keeping the spectrum.")
    _add_common_arguments(darboux)
    darboux.add_argument("-n", type=int, default=None, help="Mode index to shift.")
    darboux.add_argument("-t", type=float, default=None, help="Shift of the norming constant.")

    invert = subparsers.add_parser("invert", help="Reconstruct the potential from spectral data.")
    _add_common_arguments(invert)
    invert.add_argument("--data", default=None, help="Spectral data JSON written by the forward command.")
    invert.add_argument(
        "--max-iter",
        type=int,
        default=None,
        help="Gauss-Newton iteration limit (overrides OSCISPEC_MAX_ITER).",
    )

    weber = subparsers.add_parser("weber-table", help="Unperturbed boundary values and constants per mode.")
    _add_common_arguments(weber)

    hardy = subparsers.add_parser("hardy-transform", help="Generating functions of a potential or a series.")
    _add_common_arguments(hardy)
    hardy.add_argument("--data", default=None, help="Power series JSON {coeffs: [...]}.")

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = create_argument_parser()
    args = parser.parse_args(argv)

    try:
        config = AppConfig.from_args(args)
    except OscispecError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code

    logging.basicConfig(
        level=getattr(logging, config.log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return run_command(config)
    except OscispecError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
