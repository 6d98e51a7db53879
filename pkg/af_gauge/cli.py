"""
Command-line entry point.

Usage:
    af-gauge check
    af-gauge basis --preset case1
    af-gauge scan --config runs/case2.toml --out output/case2 --seed 7 --threads 4
    af-gauge masses --preset case4
    af-gauge k0 --config runs/chain.json
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config.run_config import PRESETS, RunConfig, parse_config, preset_config
from .config.settings import LOG_LEVELS, Settings, get_settings
from .exceptions import AFGaugeError
from .processing.pipeline import create_pipeline

COMMANDS = ("basis", "scan", "masses", "k0", "check")
EXIT_USAGE = 2


def setup_logging(settings: Settings, level: Optional[str] = None) -> None:
    """Configure root logging once: stderr plus an optional log file."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        Path(settings.log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper()),
        format=settings.log_format,
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="af-gauge",
        description="Gauge fields and Higgs mass spectra on embeddings of matrix algebras",
    )
    parser.add_argument("command", choices=COMMANDS, help="Subcommand to run")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, help="Run configuration (.toml or .json)")
    source.add_argument("--preset", choices=sorted(PRESETS), help="Built-in scan case")
    parser.add_argument("--out", type=Path, help="Output directory (overrides the config)")
    parser.add_argument("--seed", type=int, help="64-bit seed for all randomness")
    parser.add_argument("--threads", type=int, help="Threads for concurrent restarts")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS)
    return parser


def load_run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """
    Resolve the run configuration from --config, --preset or the check default.

    Command-line values override the document; settings supply the seed and
    thread defaults when neither sets them.
    """
    if args.config is not None:
        config = parse_config(args.config)
    elif args.preset is not None:
        config = preset_config(args.preset)
    elif args.command == "check":
        config = preset_config("case1")
    else:
        raise AFGaugeError(f"'{args.command}' needs --config or --preset")

    explicit = config.model_fields_set
    seed = args.seed if args.seed is not None else (None if "seed" in explicit else settings.default_seed)
    threads = args.threads if args.threads is not None else (
        None if "threads" in explicit else settings.max_workers
    )
    output_dir = str(args.out) if args.out is not None else (
        None if "output_dir" in explicit else str(settings.output_dir)
    )
    return config.with_overrides(seed=seed, threads=threads, output_dir=output_dir)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logger = logging.getLogger(__name__)

    try:
        settings = get_settings()
        setup_logging(settings, args.log_level)
        config = load_run_config(args, settings)
        result = create_pipeline(config).run(args.command)
    except AFGaugeError as e:
        logger.error(str(e))
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE

    if result.report:
        print(result.report)
    for path in result.outputs:
        print(f"📁 {path}")
    if result.partial:
        print("⚠️  Partial results: some points did not converge (see warnings in the JSON output)")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
