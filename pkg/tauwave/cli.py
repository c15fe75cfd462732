"""Command-line entry point: `tauwave --config run.cfg` or `tauwave --preset ideal-free`.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations
import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import cast, get_args

from .benchmarks import PRESETS, get_benchmark
from .errors import ConfigError, InvalidEnvironmentError, SingularSystemError, SweepFailedError
from .pipeline_service import Oracle, PipelineService, build_grid, check_residuals
from .run_config import RunConfig, load_config, preset_config
from .run_repository import RunRepository


__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL"]

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_CONFIG: int = 2
EXIT_NUMERICAL: int = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tauwave",
        description="Chebyshev-Tau wavenumber-integration solver for stratified fluid waveguides.",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="run configuration file")
    source.add_argument("--preset", choices=sorted(PRESETS), help="run a named benchmark waveguide")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    parser.add_argument("--oracle", choices=get_args(Oracle), help="compare TL with the ideal-waveguide field")
    parser.add_argument("--nr", type=int, default=3000, help="range points of a preset run")
    parser.add_argument("--nz", type=int, default=401, help="depth points of a preset run")
    parser.add_argument(
        "--check-residuals",
        type=int,
        default=0,
        metavar="K",
        help="report the worst condition residual over K random wavenumbers before running",
    )
    parser.add_argument("--no-ledger", action="store_true", help="do not record the run in runs.json")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    verbosity.add_argument("--verbose", action="store_true", help="log debug detail")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.WARNING if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def _load(args: argparse.Namespace) -> tuple[RunConfig, str]:
    if args.preset is not None:
        if args.nr < 1 or args.nz < 1:
            raise ConfigError("nr/nz", "must be >= 1")
        return preset_config(get_benchmark(args.preset), nr=args.nr, nz=args.nz), args.preset
    return load_config(args.config), str(args.config)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    if args.threads is not None and args.threads < 1:
        print("tauwave: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    repository: RunRepository | None = None
    try:
        config, label = _load(args)
        if args.check_residuals > 0:
            wk = config.wavenumbers
            grid = build_grid(config.environment, wk.k_min, wk.k_max, wk.samples)
            report = check_residuals(config.environment, grid, args.check_residuals)
            print(
                f"residual check over {report.samples} wavenumbers: worst condition residual "
                f"{report.worst_residual:.3e}, worst source-jump error {report.worst_jump_error:.3e}"
            )
        repository = None if args.no_ledger else RunRepository.at(args.out)
        service = PipelineService(workers=args.threads, repository=repository)
        result = service.run(config, args.out, cast(Oracle | None, args.oracle), label)
    except (ConfigError, InvalidEnvironmentError) as exc:
        logger.error("%s", exc)
        print(f"tauwave: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SweepFailedError, SingularSystemError) as exc:
        logger.error("%s", exc)
        print(f"tauwave: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        if repository is not None:
            repository.close()
    print("\n".join(result.summary))
    print("stage times: " + ", ".join(f"{name} {seconds:.2f} s" for name, seconds in result.timings.items()))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
