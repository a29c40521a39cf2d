"""
Distortion Diagnostics - Main Entry Point
Command-line front end for fitting distortion maps of approximate posteriors
"""
import argparse
import logging
import sys
from pathlib import Path

import config

# Setup logging with UTF-8 encoding to handle special characters
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
logging.basicConfig(
    level=logging.INFO,
    format=LOG_FORMAT,
    handlers=[logging.StreamHandler(sys.stdout)]
)

logger = logging.getLogger(__name__)

# Import application components
from app_controller import DiagnosticsController, demo_defaults
from utils.exceptions import ConfigError, DiagnosticsError, PipelineError, RenderError
from utils.run_config import COMMANDS, RunConfig, load_run_config, resolve_run_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distortion-diagnostics",
        description=f"{config.APP_NAME} {config.APP_VERSION}: distortion maps of approximate posteriors",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="Command to run (may also come from --config)")
    parser.add_argument("--config", help="Sectioned key = value configuration file (a manifest works)")

    run = parser.add_argument_group("run")
    run.add_argument("--case", help="Demo case")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="Output directory")
    run.add_argument("--svg", action="store_const", const=True, help="Also render SVG figures")
    run.add_argument("--input", help="CSV file to render")

    model = parser.add_argument_group("model")
    model.add_argument("--model", help="conjugate, conjugate-2d or logistic")
    model.add_argument("--prior-var", type=float)
    model.add_argument("--noise-var", type=float)
    model.add_argument("--correlation", type=float)
    model.add_argument("--n-obs", type=int)
    model.add_argument("--p-reg", type=int)
    model.add_argument("--y-obs", help="Observed data, comma-separated")
    model.add_argument("--data-seed", type=int)

    approx = parser.add_argument_group("approximation")
    approx.add_argument("--approx", help="exact, gaussian, sign-flip, vi or ecdf")
    approx.add_argument("--mean-shift", type=float)
    approx.add_argument("--sd-scale", type=float)
    approx.add_argument("--shift", type=float)
    approx.add_argument("--pivot", type=float)

    fitting = parser.add_argument_group("fitting")
    fitting.add_argument("--coord", type=int)
    fitting.add_argument("--coord2", type=int)
    fitting.add_argument("--n-sim", type=int)
    fitting.add_argument("--keep-frac", type=float)
    fitting.add_argument("--standardize", action="store_const", const=True)
    fitting.add_argument("--hidden", help="Hidden layer widths, comma-separated")
    fitting.add_argument("--components", type=int)
    fitting.add_argument("--activation")
    fitting.add_argument("--lr", type=float)
    fitting.add_argument("--epochs", type=int)
    fitting.add_argument("--batch-size", type=int)
    fitting.add_argument("--patience", type=int)

    checks = parser.add_argument_group("checks")
    checks.add_argument("--alpha", type=float)
    checks.add_argument("--bins", type=int)
    checks.add_argument("--blocks", type=int)
    checks.add_argument("--checkpoints", help="Nested prefix sizes, comma-separated")
    checks.add_argument("--oracle-draws", type=int)
    checks.add_argument("--coverage-points", type=int)
    return parser


def resolve(args) -> RunConfig:
    """Demo case defaults, then the configuration file, then flags"""
    overrides = {k: v for k, v in vars(args).items() if k != "config"}
    file_values = load_run_config(args.config) if args.config else {}
    command = args.command or file_values.get("command")
    if command is None:
        raise ConfigError("No command given (positional argument or [run] command in --config)")
    case = args.case or file_values.get("case", "")
    base = None
    if command == "demo":
        base = RunConfig(**demo_defaults(case))
    overrides["command"] = command
    return resolve_run_config(args.config, overrides, base)


def attach_log_file(directory: Path):
    """Log to <directory>/LOG_FILE in addition to stdout"""
    root = logging.getLogger()
    for handler in [h for h in root.handlers if isinstance(h, logging.FileHandler)]:
        root.removeHandler(handler)
        handler.close()
    directory.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(directory / config.LOG_FILE, encoding='utf-8')
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)


def main(argv=None) -> int:
    """Main application entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        run_config = resolve(args)
        controller = DiagnosticsController(run_config)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    attach_log_file(run_config.output_dir)
    logger.info("=" * 60)
    logger.info(f"Starting {config.APP_NAME} {config.APP_VERSION}")
    logger.info("=" * 60)

    try:
        result = controller.run()
        controller.write_manifest(result)
    except (ConfigError, RenderError) as e:
        logger.error(f"Usage error: {str(e)}")
        return EXIT_USAGE
    except PipelineError as e:
        logger.error(f"Pipeline failed at stage '{e.stage}': {e.cause}")
        return EXIT_FAILURE
    except DiagnosticsError as e:
        logger.error(f"Run failed: {str(e)}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Fatal error: {str(e)}", exc_info=True)
        return EXIT_FAILURE

    if not result.passed:
        logger.warning("Validation checks failed")
        return EXIT_FAILURE
    logger.info("Run completed successfully")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
