"""
fgsynth - foreground-aware layered image synthesis

Main entry point: train, generate, composite, evaluate, invert and oracle subcommands.
"""

import argparse
import logging
import os
import sys

# Ensure fgsynth/ is on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from dotenv import load_dotenv  # noqa: E402

# Setup simple logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)


def build_parser() -> argparse.ArgumentParser:
    from interfaces.commands import (
        register_composite_command,
        register_evaluate_command,
        register_generate_command,
        register_invert_command,
        register_oracle_command,
        register_train_command,
    )

    parser = argparse.ArgumentParser(
        prog='fgsynth',
        description='Layered foreground/background/mask image generator'
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging"
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    register_train_command(subparsers)
    register_generate_command(subparsers)
    register_composite_command(subparsers)
    register_evaluate_command(subparsers)
    register_invert_command(subparsers)
    register_oracle_command(subparsers)
    return parser


def main(argv=None) -> int:
    """Main entry point; returns the process exit code."""
    load_dotenv()
    args = build_parser().parse_args(argv)

    log_level = logging.DEBUG if args.debug else logging.INFO
    logging.getLogger().setLevel(log_level)
    logger = logging.getLogger(__name__)

    logger.info(f"=== fgsynth {args.command} Starting ===")
    if args.debug:
        logger.debug("Debug mode enabled")

    from interfaces.error_handlers import run_with_error_handling
    return run_with_error_handling(args.handler, args)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nInterrupted by user")
        sys.exit(130)
