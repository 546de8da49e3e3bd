import argparse
import logging
import sys
from pathlib import Path

from core.report_format import ReportFormat
from pipeline.config import GenerationConfig
from pipeline.evaluate import run_baseline, run_metrics
from pipeline.exit_code import ExitCode
from pipeline.generate import run_generate
from pipeline.inspection import run_inspect
from pipeline.probe import DEFAULT_CELL, DEFAULT_PROBE_SIZE, run_checkerboard

logger = logging.getLogger("cli")


def _load_config(args: argparse.Namespace) -> GenerationConfig:
    if args.config is None:
        config = GenerationConfig()
    else:
        config = GenerationConfig.load(args.config)
    return config.with_overrides(
        input_dir=args.input,
        output_dir=args.output,
        seed=args.seed,
        workers=args.workers,
        visualize=True if args.viz else None,
    )


def generate(args: argparse.Namespace) -> ExitCode:
    result = run_generate(_load_config(args))
    if result.skipped:
        print(
            f"Skipped {len(result.skipped_inputs)} undecodable inputs:", file=sys.stderr
        )
        for path in result.skipped_inputs:
            print(f"\t{path}", file=sys.stderr)
        return ExitCode.PARTIAL_FAILURE
    return ExitCode.OK


def inspect(args: argparse.Namespace) -> ExitCode:
    run_inspect(args.path, args.png).print(args.format)
    return ExitCode.OK


def metrics(args: argparse.Namespace) -> ExitCode:
    result = run_metrics(args.predictions, args.manifest, args.input, args.report)
    result.summary.print(args.format)
    if result.summary.missing:
        return ExitCode.MISSING_PAIRS
    if result.summary.failed:
        return ExitCode.PARTIAL_FAILURE
    return ExitCode.OK


def checkerboard(args: argparse.Namespace) -> ExitCode:
    results = run_checkerboard(_load_config(args), args.width, args.height, args.cell)
    for result in results:
        print(f"{result.corruption}: {result.paths[0]}")
    return ExitCode.OK


def baseline(args: argparse.Namespace) -> ExitCode:
    count = run_baseline(args.manifest, args.predictions)
    print(f"Wrote {count} predictions to {args.predictions}")
    return ExitCode.OK


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON generation config")
    parser.add_argument("--input", type=Path, help="directory of clean PNG frames")
    parser.add_argument("--output", type=Path, help="directory for generated files")
    parser.add_argument("--seed", type=int, help="global seed, overrides the config")
    parser.add_argument("--workers", type=int, help="worker processes")
    parser.add_argument("--viz", action="store_true", help="write visualizations")


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Synthetic refractive and weather corruptions with ground truth"
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true")
    verbosity.add_argument("--quiet", "-q", action="store_true")
    parser.add_argument(
        "--format",
        type=ReportFormat,
        choices=list(ReportFormat),
        default=ReportFormat.TEXT,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate_parser = commands.add_parser(
        "generate", help="corrupt a directory of frames"
    )
    _add_config_flags(generate_parser)
    generate_parser.set_defaults(handler=generate)

    inspect_parser = commands.add_parser("inspect", help="visualize a UVF or KMF file")
    inspect_parser.add_argument("path", type=Path)
    inspect_parser.add_argument("--png", type=Path, help="where to write the preview")
    inspect_parser.set_defaults(handler=inspect)

    metrics_parser = commands.add_parser("metrics", help="score restored frames")
    metrics_parser.add_argument("predictions", type=Path)
    metrics_parser.add_argument("manifest", type=Path)
    metrics_parser.add_argument(
        "--input", type=Path, help="override the clean frame directory"
    )
    metrics_parser.add_argument("--report", type=Path, help="report path")
    metrics_parser.set_defaults(handler=metrics)

    checkerboard_parser = commands.add_parser(
        "checkerboard", help="warp a checkerboard with each refractive corruption"
    )
    _add_config_flags(checkerboard_parser)
    checkerboard_parser.add_argument("--width", type=int, default=DEFAULT_PROBE_SIZE)
    checkerboard_parser.add_argument("--height", type=int, default=DEFAULT_PROBE_SIZE)
    checkerboard_parser.add_argument("--cell", type=int, default=DEFAULT_CELL)
    checkerboard_parser.set_defaults(handler=checkerboard)

    baseline_parser = commands.add_parser(
        "baseline",
        help="invert refractive ground truth to produce reference predictions",
    )
    baseline_parser.add_argument("manifest", type=Path)
    baseline_parser.add_argument("predictions", type=Path)
    baseline_parser.set_defaults(handler=baseline)

    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="[%(levelname)s] %(name)s: %(message)s")

    # Every error type in core.errors derives from ValueError
    try:
        return int(args.handler(args))
    except (ValueError, OSError) as e:
        logger.error("%s", e)
        return ExitCode.INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
