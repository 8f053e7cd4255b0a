import argparse
import sys
from pathlib import Path

from loguru import logger

from sreda.errors import CapabilityError, ConfigError, InputError, ParameterError
from sreda.harness.commands import cmd_check, cmd_params, cmd_run, cmd_sweep
from sreda.settings import (
    AppSettings,
    ExperimentConfig,
    load_app_settings,
    load_experiment_config,
    parse_seed_list,
    with_cli_overrides,
)
from sreda.telemetry import initialize_telemetry, shutdown_telemetry, traced_span
from sreda.utils import get_app_data_dir

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CAPABILITY = 3


def get_log_file_path() -> Path:
    """Get the default path to the log file in the user's config directory."""
    config_dir = get_app_data_dir()
    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir / "sreda.log"


def configure_logging(log_file: Path | None = None) -> Path:
    """Configure loguru to log to both stderr and a rotating file.

    Args:
        log_file: Optional custom path to log file. If None, uses platform defaults.

    Returns:
        The path to the log file being used.
    """
    if log_file is None:
        log_file = get_log_file_path()
    else:
        log_file = Path(log_file).expanduser().resolve()
        log_file.parent.mkdir(parents=True, exist_ok=True)

    # Keep the default stderr handler; add a rotating file handler
    logger.add(
        log_file,
        rotation="10 MB",
        retention=3,
        compression="zip",
        level="DEBUG",
        format="{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}",
        backtrace=True,
        diagnose=True,
    )

    logger.info(f"Logging to file: {log_file}")
    return log_file


def _experiment(args: argparse.Namespace) -> ExperimentConfig:
    config = load_experiment_config(args.config)
    seeds = parse_seed_list(args.seeds) if args.seeds is not None else None
    return with_cli_overrides(
        config, out=args.out, seeds=seeds, cap=args.cap, no_diagnostics=args.no_diagnostics
    )


def _run(args: argparse.Namespace, settings: AppSettings) -> int:
    return cmd_run(_experiment(args), settings)


def _sweep(args: argparse.Namespace, settings: AppSettings) -> int:
    return cmd_sweep(_experiment(args), settings)


def _check(args: argparse.Namespace, settings: AppSettings) -> int:
    return cmd_check(quick=args.quick)


def _params(args: argparse.Namespace, settings: AppSettings) -> int:
    return cmd_params(args.epsilon, args.kappa, args.ell, args.sigma, args.delta_f, args.n)


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Experiment file (.toml or .json).")
    parser.add_argument("--out", type=Path, help="Output directory for CSV and JSON artifacts.")
    parser.add_argument("--seeds", help="Comma-separated run seeds, e.g. 0,1,2.")
    parser.add_argument("--cap", type=int, help="Hard cap on outer iterations.")
    parser.add_argument(
        "--no-diagnostics",
        action="store_true",
        help="Skip exact gradient diagnostics in the traces.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sreda",
        description="SREDA minimax solvers and benchmark harness.",
    )
    parser.add_argument(
        "--settings-file",
        type=Path,
        help="Path to the process settings TOML file.",
    )
    subparsers = parser.add_subparsers(
        dest="command", help="Available commands", required=True
    )

    run_parser = subparsers.add_parser("run", help="Run one algorithm over all seeds.")
    _add_experiment_flags(run_parser)
    run_parser.set_defaults(func=_run)

    sweep_parser = subparsers.add_parser(
        "sweep", help="Sweep epsilon and fit eval-complexity slopes."
    )
    _add_experiment_flags(sweep_parser)
    sweep_parser.set_defaults(func=_sweep)

    check_parser = subparsers.add_parser("check", help="Run the property check suite.")
    check_parser.add_argument(
        "--quick", action="store_true", help="Use smaller Monte Carlo sample sizes."
    )
    check_parser.set_defaults(func=_check)

    params_parser = subparsers.add_parser(
        "params", help="Print derived parameters and predicted oracle calls."
    )
    params_parser.add_argument("--epsilon", type=float, required=True)
    params_parser.add_argument("--kappa", type=float, required=True)
    params_parser.add_argument("--ell", type=float, default=1.0)
    params_parser.add_argument("--sigma", type=float, default=1.0)
    params_parser.add_argument("--delta-f", dest="delta_f", type=float, default=1.0)
    params_parser.add_argument("--n", type=int, help="Component count for finite sums.")
    params_parser.set_defaults(func=_params)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main application entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_app_settings(args.settings_file)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(settings.log_file)
    initialize_telemetry(
        service_name=settings.telemetry.service_name,
        otlp_endpoint=settings.telemetry.otlp_endpoint,
        export_to_file=settings.telemetry.export_to_file,
        trace_file=settings.telemetry.trace_file,
        enabled=settings.telemetry.enabled,
        rotation_enabled=settings.telemetry.rotation_enabled,
        rotation_max_size_mb=settings.telemetry.rotation_max_size_mb,
    )

    try:
        with traced_span(f"experiment.{args.command}", command=args.command) as span:
            code = args.func(args, settings)
            if span:
                span.set_attribute("experiment.exit_code", code)
            return code
    except (ConfigError, ParameterError, InputError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAPABILITY
    except Exception as e:
        logger.opt(exception=True).error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        try:
            shutdown_telemetry()
        except Exception as e:
            logger.error(f"Error shutting down telemetry: {e}")


if __name__ == "__main__":
    sys.exit(main())
