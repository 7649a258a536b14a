"""Command-line application and entry point."""

import argparse
import logging
import sys
from collections.abc import Sequence

from . import __version__
from .controllers.application_controller import ApplicationController
from .utils.error_handler import handle_error
from .utils.exceptions import ExitCode, ValidationError
from .utils.logging_config import setup_error_logging, setup_logging
from .utils.path_manager import PathManager


class ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors surface as validation errors (exit 1)."""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}", field="arguments")


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="Run configuration (JSON)")
    parser.add_argument(
        "--regime",
        choices=("zero", "frac", "one"),
        help="Regime of the node density (overrides the configuration)",
    )
    parser.add_argument("--alpha", help="alpha for --regime frac: p/q or a decimal")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="thin-junction",
        description="Asymptotic spectral toolkit for thin star junctions with a heavy node.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--workdir", help="Run directory; relative paths resolve inside it")
    parser.add_argument("--workers", type=int, default=4, help="Worker threads (default: 4)")
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
    )
    parser.add_argument("--no-log-file", action="store_true", help="Log to the console only")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    spectrum = commands.add_parser("spectrum", help="Limit eigenpairs on the star graph")
    _add_config(spectrum)
    spectrum.add_argument("--count", type=int, default=5)
    spectrum.add_argument("--method", choices=("auto", "secular", "grid"), default="auto")
    spectrum.add_argument("--out", default="spectrum.csv")
    spectrum.add_argument("--format", choices=("csv", "json"), default="csv")
    spectrum.set_defaults(handler=ApplicationController.cmd_spectrum)

    expand = commands.add_parser("expand", help="Asymptotic series of one eigenvalue")
    _add_config(expand)
    expand.add_argument("--n", type=int, default=1, help="Eigenvalue index (1-based)")
    expand.add_argument("--order", type=int, default=1)
    expand.add_argument(
        "--mode",
        choices=("auto", "truncate"),
        default="auto",
        help="auto fails on missing node constants, truncate stops the series there",
    )
    expand.add_argument(
        "--compute-junction", action="store_true", help="Compute missing constants on the junction"
    )
    expand.add_argument("--out", default="series.json")
    expand.set_defaults(handler=ApplicationController.cmd_expand)

    oracle = commands.add_parser("oracle", help="Eigenvalues of the lumped-node surrogate")
    _add_config(oracle)
    oracle.add_argument("--eps", required=True, help="Comma-separated values of eps")
    oracle.add_argument("--count", type=int, default=3)
    oracle.add_argument("--points", type=int, default=2001, help="Grid points per edge")
    oracle.add_argument("--node-offset", action="store_true", help="Start edges at eps*l0")
    oracle.add_argument(
        "--bounds", action="store_true", help="Also write the bounds and eigenvector report"
    )
    oracle.add_argument("--out", default="oracle.csv")
    oracle.set_defaults(handler=ApplicationController.cmd_oracle)

    rates = commands.add_parser("rates", help="Fit convergence rates from an oracle CSV")
    rates.add_argument("--input", required=True, help="CSV written by the oracle command")
    rates.add_argument("--n", type=int, default=1)
    rates.add_argument("--out", default="rates.json")
    rates.set_defaults(handler=ApplicationController.cmd_rates)

    junction = commands.add_parser("junction", help="Node constants from the junction solves")
    _add_config(junction)
    junction.add_argument("--n", type=int, default=1)
    junction.add_argument("--order", type=int, default=1)
    junction.add_argument("--spacing", type=float, help="Voxel size (default l0/8)")
    junction.add_argument("--length", type=float, help="Outlet truncation length (default 6)")
    junction.add_argument("--out", default="node_constants.json")
    junction.set_defaults(handler=ApplicationController.cmd_junction)

    return parser


class ThinJunctionApp:
    """Command-line application."""

    def __init__(self):
        self.controller: ApplicationController | None = None
        self.args: argparse.Namespace | None = None
        self.logger = logging.getLogger(__name__)

    def initialize(self, argv: Sequence[str] | None = None) -> None:
        """Parse arguments and set up logging and the controller."""
        self.args = build_parser().parse_args(argv)

        workdir = PathManager.resolve_workdir(self.args.workdir)
        setup_logging(level=self.args.log_level, log_to_file=not self.args.no_log_file)
        if not self.args.no_log_file:
            setup_error_logging()
        self.logger.info(f"thin-junction {self.args.command} in {workdir}")

        self.controller = ApplicationController(workdir, max_workers=self.args.workers)

    def run(self) -> int:
        if not self.controller or not self.args:
            raise RuntimeError("Application not initialized. Call initialize() first.")
        return self.controller.run(self.args)


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the command line."""
    app = ThinJunctionApp()

    try:
        app.initialize(argv)
    except SystemExit as e:
        # --help and --version
        return int(e.code or ExitCode.OK)
    except Exception as e:
        code = handle_error(e, log_error=False)
        print(f"error: {e}", file=sys.stderr)
        return int(code)

    return app.run()


if __name__ == "__main__":
    sys.exit(main())
