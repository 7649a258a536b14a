"""Command controller that coordinates configuration, solvers and outputs."""

import argparse
import logging
from pathlib import Path

import numpy as np

from .. import __version__
from ..models.config import RunConfig
from ..models.manifest import RunManifest
from ..models.node_constants import NodeConstants
from ..models.regime import AlphaRegime
from ..services.base import ValidationResult
from ..services.config_manager import ConfigManager
from ..services.constants_provider import JunctionConstantsProvider, TableConstantsProvider
from ..services.expansion import SERIES_COLUMNS, ExpansionService, mass_chain_coefficient
from ..services.junction import JunctionService
from ..services.limit_spectrum import solve_limit_spectrum, write_spectrum
from ..services.oracle import ORACLE_COLUMNS, OracleService, fit_rate
from ..services.validation_service import ValidationService
from ..utils.error_handler import ErrorHandler
from ..utils.exceptions import ExitCode, ValidationError
from ..utils.formatting import format_float, parse_float, read_csv, write_csv, write_json
from ..utils.path_manager import PathManager


class ApplicationController:
    """
    Runs one command per invocation.

    Every command resolves its paths inside the run directory, writes its
    outputs and exactly one manifest next to the main output, and returns
    the process exit code.
    """

    def __init__(self, workdir: Path, max_workers: int = 4):
        self.logger = logging.getLogger(__name__)
        self.workdir = workdir

        # Services
        self.validation_service = ValidationService()
        self.config_manager = ConfigManager(self.validation_service)
        self.expansion_service = ExpansionService(max_workers=max_workers)
        self.junction_service = JunctionService(max_workers=max_workers)
        self.oracle_service = OracleService(max_workers=max_workers)

        self.error_handler = ErrorHandler()

    # helpers

    @staticmethod
    def _require(result: ValidationResult) -> None:
        if not result.is_valid:
            raise ValidationError(result.message, details=dict(result.details))

    def _path(self, text: str) -> Path:
        return PathManager.resolve_in_workdir(text, self.workdir)

    def _load(self, args: argparse.Namespace) -> RunConfig:
        """Configuration with the regime taken from --regime/--alpha when given."""
        config = self.config_manager.load_config(self._path(args.config))
        if getattr(args, "regime", None):
            config = config.with_regime(AlphaRegime.parse(args.regime, getattr(args, "alpha", None)))
        return config

    def _manifest(self, command: str, args: argparse.Namespace, config: RunConfig | None) -> RunManifest:
        parameters = {
            key: value
            for key, value in sorted(vars(args).items())
            if key not in ("handler", "command") and value is not None
        }
        return RunManifest(
            command=command,
            version=__version__,
            config_sha256=config.sha256 if config else None,
            parameters=parameters,
        )

    def _finish(self, manifest: RunManifest, output: Path, code: ExitCode = ExitCode.OK) -> int:
        manifest.finish(code)
        path = manifest.save(RunManifest.path_for(output))
        self.logger.info(f"Manifest written to {path}")
        return int(code)

    @staticmethod
    def _print_table(header, rows) -> None:
        print("\t".join(header))
        for row in rows:
            print("\t".join(format_float(v) if isinstance(v, float) else str(v) for v in row))

    # commands

    def cmd_spectrum(self, args: argparse.Namespace) -> int:
        self._require(self.validation_service.validate_count(args.count))
        config = self._load(args)
        manifest = self._manifest("spectrum", args, config)

        pairs = solve_limit_spectrum(config.graph, config.regime, args.count, method=args.method)
        output = self._path(args.out)
        manifest.add_output(write_spectrum(output, pairs, config.regime, fmt=args.format))

        flagged = [pair.index for pair in pairs if pair.degenerate]
        if flagged:
            self.logger.warning(f"Degenerate eigenvalues at indices {flagged}")
        self.logger.info(f"Spectrum written to {output}")
        return self._finish(manifest, output)

    def cmd_expand(self, args: argparse.Namespace) -> int:
        self._require(self.validation_service.validate_count(args.n))
        self._require(self.validation_service.validate_order(args.order))
        config = self._load(args)
        manifest = self._manifest("expand", args, config)
        graph, regime = config.graph, config.regime

        provider = None
        if args.compute_junction:
            provider = JunctionConstantsProvider(
                graph, regime, self.junction_service, tables=TableConstantsProvider.from_graph(graph, regime)
            )
        [series] = self.expansion_service.expand_many(
            graph, regime, [args.n], args.order, provider=provider, strict=args.mode == "auto"
        )

        output = self._path(args.out)
        manifest.add_output(series.save(output))
        self._print_table(SERIES_COLUMNS, series.rows())
        if series.flags.get("truncated_at"):
            self.logger.warning(f"Series truncated at exponent {series.flags['truncated_at']}")
        return self._finish(manifest, output)

    def _epsilons(self, text: str) -> list[float]:
        values = [parse_float(v) for v in text.split(",") if v.strip()]
        self._require(self.validation_service.validate_epsilons(values))
        return values

    def cmd_oracle(self, args: argparse.Namespace) -> int:
        epsilons = self._epsilons(args.eps)
        self._require(self.validation_service.validate_count(args.count))
        self._require(self.validation_service.validate_points(args.points))
        config = self._load(args)
        manifest = self._manifest("oracle", args, config)
        graph, regime = config.graph, config.regime

        self.oracle_service.points_per_edge = args.points
        values = self.oracle_service.sweep(
            graph, regime, epsilons, args.count, node_offset=args.node_offset
        )
        pairs = solve_limit_spectrum(graph, regime, args.count)
        rate = 1.0 - regime.alpha

        rows = []
        for j, eps in enumerate(epsilons):
            for pair in pairs:
                n = pair.index
                if regime.has_vertex_mass:
                    predicted = pair.eigenvalue
                else:
                    predicted = pair.eigenvalue + mass_chain_coefficient(pair, graph.mass) * eps**rate
                value = float(values[j, n - 1])
                rows.append([eps, n, value, value - pair.eigenvalue, predicted, value - predicted])

        output = self._path(args.out)
        manifest.add_output(write_csv(output, ORACLE_COLUMNS, rows))
        if args.bounds:
            manifest.add_output(self._bounds_report(args, config, epsilons, values, output))
        self.logger.info(f"Oracle sweep over {len(epsilons)} values of eps written to {output}")
        return self._finish(manifest, output)

    def _bounds_report(
        self, args: argparse.Namespace, config: RunConfig, epsilons: list[float], values, output: Path
    ) -> Path:
        graph, regime = config.graph, config.regime
        report = self.oracle_service.bounds_check(
            graph, regime, epsilons, args.count, node_offset=args.node_offset, values=values
        )
        if not args.node_offset:
            # the ground state is simple, so its eigenvector is comparable
            report["eigenvector_deviation"] = self.oracle_service.eigenvector_deviation(
                graph, regime, 1, min(epsilons)
            )
        if not (report["bounded_below"] and report["bounded_above"]):
            self.logger.warning(f"Sweep violates the eigenvalue bounds: {report}")
        return write_json(output.with_name(output.stem + ".bounds.json"), report)

    def cmd_rates(self, args: argparse.Namespace) -> int:
        source = self._path(args.input)
        manifest = self._manifest("rates", args, None)
        rows = [row for row in read_csv(source) if int(row["n"]) == args.n]
        if not rows:
            raise ValidationError(f"No rows for n={args.n} in {source}", field="n", value=args.n)

        epsilons = [parse_float(row["eps"]) for row in rows]
        self._require(self.validation_service.validate_rate_samples(epsilons))
        order = np.argsort(epsilons)[::-1]
        epsilons = [epsilons[i] for i in order]
        signal = [parse_float(rows[i]["lambda_minus_Lambda"]) for i in order]
        residual = [parse_float(rows[i]["residual"]) for i in order]

        fit = fit_rate(epsilons, signal)
        report = {"n": args.n, "source": str(source), "fit": fit.to_dict()}
        if any(r != 0.0 for r in residual):
            report["residual_fit"] = fit_rate(epsilons, residual).to_dict()

        output = self._path(args.out)
        manifest.add_output(write_json(output, report))
        print(f"slope\t{format_float(fit.slope)}")
        return self._finish(manifest, output)

    def cmd_junction(self, args: argparse.Namespace) -> int:
        self._require(self.validation_service.validate_count(args.n))
        self._require(self.validation_service.validate_order(args.order))
        config = self._load(args)
        manifest = self._manifest("junction", args, config)
        graph, regime = config.graph, config.regime

        service = self.junction_service
        service.spacing = args.spacing
        service.length = args.length
        provider = JunctionConstantsProvider(graph, regime, service)
        [series] = self.expansion_service.expand_many(
            graph, regime, [args.n], args.order, provider=provider, strict=False
        )

        delta, mass, tails = {}, {}, {}
        for entry in series.computed_entries:
            inner = series.inner.get(entry.key)
            if inner is None or inner.source == "trivial":
                continue
            k, p = entry.provenance
            for i, value in zip((2, 3), inner.delta, strict=True):
                delta[(k, p, i)] = value
            mass[(k, p)] = inner.mass_remainder
            for i, value in enumerate(inner.tails, start=1):
                if value is not None:
                    tails[(k, p, i)] = value
        constants = NodeConstants(delta=delta, mass=mass, tails=tails)
        constants = NodeConstants.from_tables(constants.to_tables(), source=self._provenance(service, graph))
        spread = service.profile_spread(graph, provider.requests[0]) if provider.requests else None

        mesh = service.mesh(graph)
        n2, n3 = service.homogeneous_fields(graph)
        output = self._path(args.out)
        manifest.add_output(write_json(output, constants.to_dict()))
        report_path = output.with_name(output.stem + ".report.json")
        report = {
            "mesh": mesh.to_dict(),
            "homogeneous": [n2.to_dict(), n3.to_dict()],
            "target_slopes": [1.0 / a for a in mesh.target_areas],
            "profile_spread": spread,
            "truncated_at": series.flags.get("truncated_at"),
        }
        manifest.add_output(write_json(report_path, report))
        self.logger.info(f"Junction constants written to {output}")
        return self._finish(manifest, output)

    @staticmethod
    def _provenance(service: JunctionService, graph) -> str:
        mesh = service.mesh(graph)
        return f"computed(spacing={mesh.spacing:g},length={mesh.length:g})"

    def run(self, args: argparse.Namespace) -> int:
        """Dispatch a parsed command line; failures become exit codes."""
        try:
            return args.handler(self, args)
        except Exception as e:
            code = self.error_handler.handle_error(e)
            self._failure_manifest(args, code)
            return int(code)

    def _failure_manifest(self, args: argparse.Namespace, code: ExitCode) -> None:
        out = getattr(args, "out", None)
        if not out:
            return
        try:
            output = self._path(out)
            manifest = self._manifest(args.command, args, None)
            manifest.finish(code)
            manifest.save(RunManifest.path_for(output))
        except Exception as e:
            self.logger.warning(f"Could not write failure manifest: {e}")
