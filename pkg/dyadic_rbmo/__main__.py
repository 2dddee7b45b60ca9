"""
Dyadic RBMO Toolkit CLI entry point.

Command-line interface for building lattices and filtrations, computing
norms and running the operator, sparse and matrix-valued experiments.
"""

import sys
import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from .core.toolkit import RBMOToolkit, RunResult
from .kernels import KERNEL_REGISTRY
from .utils.config_parser import ConfigParser
from .utils.corpus import list_measures
from .utils.io_utils import dumps, to_jsonable, write_json
from config.constants import (
    ARTIFACT_FAILURE, DEFAULT_OUTPUT_FORMAT, ERROR_INVALID_CONFIG, ERROR_YAML_UNAVAILABLE, EXIT_INVARIANT_FAILURE,
    EXIT_OK, EXIT_USAGE_ERROR, LOG_FORMAT, SUCCESS_RUN_COMPLETED,
)

# (command, action) -> toolkit method
COMMANDS = {
    ("lattice", "build"): "run_lattice",
    ("filtration", "verify"): "run_filtration",
    ("spaces", "norms"): "run_norms",
    ("operators", "apply"): "run_apply",
    ("operators", "czd"): "run_czd",
    ("operators", "weak11"): "run_weak11",
    ("sparse", "dominate"): "run_sparse",
    ("sparse", "a2-sweep"): "run_a2_sweep",
    ("matrixval", "endpoint"): "run_matrix",
    ("report", "all"): "run_all",
}


def _run_options() -> argparse.ArgumentParser:
    """Flags shared by every run command; defaults are None so config files are not overridden."""
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--measure", "-m", help="Measure file or builtin:<name>[:<size>]")
    options.add_argument("--config", "-c", help="Run configuration file (JSON or YAML)")
    options.add_argument("--out", "-o", help="Artifact directory (default: artifacts)")
    options.add_argument("--seed", type=int, help="Seed for the random field corpora")
    options.add_argument("--mode", choices=["paper", "test"], help="Lattice parameter mode")
    options.add_argument("--kernel", "-k", help="cauchy | riesz:<j> | custom:<path>")
    options.add_argument("--epsilon", type=float, help="Kernel truncation radius")
    options.add_argument("--jobs", "-j", type=int, help="Worker threads for per-field loops")
    options.add_argument("--alpha", type=float, help="Lattice dilation alpha")
    options.add_argument("--ell", type=int, help="Exponent with beta = alpha^ell")
    options.add_argument("--lattice", help="Lattice JSON file to reuse instead of building one")
    options.add_argument("--field", help="Field file replacing the random corpus")
    options.add_argument("--weights", help="JSON list of step-weight levels for a2-sweep")
    options.add_argument("--lambda", dest="sparse_lambda", type=float, help="Sparse oscillation parameter")
    options.add_argument("--p", dest="p_grid", type=float, nargs="+", help="Exponents for the RBMO_Σ p-norms")
    return options


def create_parser() -> argparse.ArgumentParser:
    """Create command-line argument parser."""

    parser = argparse.ArgumentParser(
        prog="dyadic-rbmo",
        description="Dyadic RBMO Toolkit - martingale BMO over discrete nondoubling measures",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  dyadic-rbmo lattice build --measure builtin:uniform:64
  dyadic-rbmo spaces norms --measure measure.json --lattice artifacts/lattice.json --field f.json
  dyadic-rbmo sparse a2-sweep --weights levels.json
  dyadic-rbmo report all --measure builtin:gaussian --out run1
        """
    )

    # Global options
    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s 0.1.0"
    )

    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable verbose output"
    )

    parser.add_argument(
        "--format", "-f",
        choices=["json", "yaml", "text"],
        default=DEFAULT_OUTPUT_FORMAT,
        help=f"Output format (default: {DEFAULT_OUTPUT_FORMAT})"
    )

    subparsers = parser.add_subparsers(
        dest="command",
        help="Available commands",
        metavar="COMMAND"
    )

    options = _run_options()
    helps = {
        "lattice": "Build and verify the dyadic lattice",
        "filtration": "Build and verify the doubling filtration",
        "spaces": "RBMO_Σ, Tolsa RBMO and H¹_Σ norms",
        "operators": "Apply a Calderón-Zygmund operator, decompose fields, weak (1,1) table",
        "sparse": "Sparse domination and A₂ weight experiments",
        "matrixval": "Operator-valued L∞ -> RBMO_Σ endpoint",
        "report": "Run every command and write summary.json",
    }
    actions: Dict[str, List[str]] = {}
    for command, action in COMMANDS:
        actions.setdefault(command, []).append(action)
    for command, choices in actions.items():
        sub = subparsers.add_parser(command, parents=[options], help=helps[command])
        sub.add_argument("action", choices=choices, help="What to run")

    list_parser = subparsers.add_parser(
        "list",
        help="List bundled measures and kernels"
    )
    list_parser.add_argument(
        "type",
        choices=["measures", "kernels"],
        help="What to list"
    )

    return parser


def build_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """CLI flags as RunConfig overrides."""
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "measure", "out", "seed", "mode", "kernel", "epsilon", "jobs", "alpha", "ell", "lattice",
            "weights", "sparse_lambda", "p_grid",
        )
    }
    # matrixval reads --field as a matrix field file
    target = "matrix_field" if args.command == "matrixval" else "field"
    overrides[target] = getattr(args, "field", None)
    return overrides


def main(argv: Optional[List[str]] = None):
    """Main CLI entry point."""

    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(EXIT_USAGE_ERROR)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format=LOG_FORMAT)

    try:
        if args.command == "list":
            handle_list(args)
            sys.exit(EXIT_OK)

        config, issues = ConfigParser().parse_and_validate(args.config, build_overrides(args))
        if issues:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: {'; '.join(issues)}")
        toolkit = RBMOToolkit(config)
        result = getattr(toolkit, COMMANDS[(args.command, args.action)])()
        sys.exit(handle_result(toolkit, result, args))

    except FileNotFoundError as e:
        report_error("FileNotFoundError", e, args)
    except (ValueError, OSError) as e:
        # LatticeError and FiltrationError are ValueErrors; anything else propagates with its traceback
        report_error(type(e).__name__, e, args)


def report_error(kind: str, error: Exception, args: argparse.Namespace) -> None:
    """Write a JSON error record to stderr and exit with the usage/IO status."""
    if args.verbose:
        import traceback
        traceback.print_exc()
    print(json.dumps({"error": kind, "message": str(error)}, ensure_ascii=False), file=sys.stderr)
    sys.exit(EXIT_USAGE_ERROR)


def handle_result(toolkit: RBMOToolkit, result: RunResult, args: argparse.Namespace) -> int:
    """Print the run summary and return the exit status."""

    output_data = {"out": str(toolkit.out_dir), **result.to_dict()}

    if args.format == "json":
        output_text = dumps(output_data)
    elif args.format == "yaml":
        try:
            import yaml
        except ImportError:
            raise ValueError(ERROR_YAML_UNAVAILABLE)
        output_text = yaml.safe_dump(to_jsonable(output_data), default_flow_style=False, sort_keys=True)
    else:  # text format
        output_text = format_result_text(result, toolkit.out_dir)

    print(output_text)

    if not result.passed:
        failure = write_json(Path(toolkit.out_dir) / ARTIFACT_FAILURE, result.to_dict())
        print(f"\n❌ {len(result.report.failures)} asserted invariant(s) failed; see {failure}", file=sys.stderr)
        return EXIT_INVARIANT_FAILURE

    if args.verbose:
        print(f"\n✅ {SUCCESS_RUN_COMPLETED}")
    return EXIT_OK


def handle_list(args):
    """Handle list command."""

    if args.type == "measures":
        print("Bundled Measures:")
        print("=" * 17)
        for entry in list_measures():
            print(f"• {entry['name']}")
            print(f"  {entry['description']}")
            print()

    elif args.type == "kernels":
        print("Available Kernels:")
        print("=" * 18)
        for name, kernel_cls in sorted(KERNEL_REGISTRY.items()):
            doc = (kernel_cls.__doc__ or "").strip().splitlines()
            print(f"• {name}")
            if doc:
                print(f"  {doc[0]}")
            print()


def format_result_text(result: RunResult, out_dir: Path) -> str:
    """Format a run result as readable text."""

    lines = []
    lines.append(f"# {result.command}")
    lines.append("=" * 30)
    lines.append(f"Status: {'PASSED' if result.passed else 'FAILED'}")
    lines.append(f"Output directory: {out_dir}")
    lines.append("")

    lines.append("Artifacts:")
    for name in sorted(result.artifacts):
        lines.append(f"  • {name}")
    lines.append("")

    lines.append("Summary:")
    for key, value in result.summary.items():
        if isinstance(value, dict):
            lines.append(f"  {key}:")
            for sub_key, sub_value in value.items():
                lines.append(f"    {sub_key}: {sub_value}")
        else:
            lines.append(f"  {key}: {value}")

    if result.report.failures:
        lines.append("")
        lines.append("Failed invariants:")
        for check in result.report.failures:
            lines.append(f"  ❌ {check.name}: {check.value} {check.message}".rstrip())

    return "\n".join(lines)


if __name__ == "__main__":
    main()
