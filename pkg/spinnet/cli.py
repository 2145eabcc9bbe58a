"""
Command-line interface for spinnet

Each registered experiment is a subcommand. Common options are resolved in the
order command line, then ``--config`` file, then environment, then default.
"""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from spinnet import __version__, registry
from spinnet.common.errors import (
    EXIT_CONFIG,
    EXIT_OK,
    ConfigurationError,
    exit_code_for,
    format_error_response,
)
from spinnet.common.logging import configure_logging, get_logger
from spinnet.common.utils import filter_none_values
from spinnet.experiments.base import DEFAULT_OUTPUT_DIR, DEFAULT_SEED, DEFAULT_THREADS, RunConfig

logger = get_logger(__name__)

# Keys of a config file that are run options rather than experiment parameters
RUN_KEYS = ("seed", "threads", "output")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=Path,
        help="JSON file of parameters, optionally with seed, threads and output",
    )
    common.add_argument(
        "--output",
        "-o",
        type=Path,
        help=f"Output directory (default: {DEFAULT_OUTPUT_DIR}, env: SPINNET_OUTPUT_DIR)",
    )
    common.add_argument(
        "--seed",
        type=int,
        help=f"Random seed (default: {DEFAULT_SEED}, env: SPINNET_SEED)",
    )
    common.add_argument(
        "--threads",
        type=int,
        help=f"Worker threads (default: {DEFAULT_THREADS}, env: SPINNET_THREADS)",
    )
    common.add_argument(
        "--debug",
        "-d",
        action="store_true",
        default=os.environ.get("SPINNET_DEBUG", "").lower() == "true",
        help="Enable debug logging (env: SPINNET_DEBUG)",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """Build the top-level parser with one subcommand per experiment."""
    parser = argparse.ArgumentParser(
        prog="spinnet",
        description="Spin network transport, routing and gate synthesis experiments",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="experiment", metavar="EXPERIMENT", required=True)
    common = _common_options()
    for name, experiment_class in registry.get_available_experiments().items():
        sub = subparsers.add_parser(
            name,
            help=experiment_class.help,
            description=experiment_class.__doc__,
            epilog=experiment_class.epilog,
            parents=[common],
            formatter_class=argparse.RawDescriptionHelpFormatter,
            allow_abbrev=False,
        )
        experiment_class.add_arguments(sub)
    return parser


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a flat JSON object of parameters and run options.

    Raises:
        ConfigurationError: If the file cannot be read or is not a JSON object
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot load config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge command line, config file and environment into a RunConfig.

    Raises:
        ConfigurationError: If a value is invalid
    """
    experiment_class = registry.get_available_experiments()[args.experiment]
    file_values = load_config_file(args.config) if args.config else {}
    cli_params = filter_none_values(
        {name: getattr(args, name, None) for name in experiment_class.Params.model_fields}
    )
    params = {k: v for k, v in file_values.items() if k not in RUN_KEYS}
    params.update(cli_params)
    run_options = filter_none_values({key: file_values.get(key) for key in RUN_KEYS})
    run_options.update(filter_none_values({key: getattr(args, key) for key in RUN_KEYS}))
    try:
        return RunConfig.from_environment(args.experiment, params=params, **run_options)
    except (ValidationError, ValueError) as exc:
        raise ConfigurationError(f"invalid run configuration: {exc}") from exc


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the chosen experiment and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    configure_logging(debug=args.debug)
    try:
        config = resolve_config(args)
        experiment = registry.get_available_experiments()[config.experiment](config)
        outputs = experiment.run()
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except Exception as exc:  # pylint: disable=broad-except
        response = format_error_response(exc)
        print(json.dumps(response), file=sys.stderr)
        logger.debug("Traceback", exc_info=True)
        return exit_code_for(exc)
    for path in outputs:
        print(path)
    return EXIT_OK


def main() -> None:
    """Main entry point for the spinnet CLI."""
    load_dotenv()
    sys.exit(run())


if __name__ == "__main__":
    main()
