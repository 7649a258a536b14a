"""Solvers and the services that orchestrate them."""

from .config_manager import ConfigManager, load_config
from .constants_provider import (
    ConstantsProvider,
    JunctionConstantsProvider,
    TableConstantsProvider,
)
from .corrector import CorrectorProblem, CorrectorSolution, solve_corrector
from .expansion import (
    AsymptoticSeries,
    ExpansionService,
    build_lattice,
    evaluate_eigenfunction,
    evaluate_series,
    expand,
    expand_alpha0,
    expand_alpha1,
    expand_fractional,
)
from .junction import (
    InnerForcing,
    JunctionMesh,
    JunctionService,
    NField,
    delta_constant,
    solve_homogeneous,
    solve_inner_inhomogeneous,
)
from .limit_spectrum import assemble_discrete, secular_spectrum, solve_limit_spectrum
from .oracle import OracleService, RateFit, fit_rate, solve_surrogate
from .validation_service import ValidationService

__all__ = [
    "AsymptoticSeries",
    "ConfigManager",
    "ConstantsProvider",
    "CorrectorProblem",
    "CorrectorSolution",
    "ExpansionService",
    "InnerForcing",
    "JunctionConstantsProvider",
    "JunctionMesh",
    "JunctionService",
    "NField",
    "OracleService",
    "RateFit",
    "TableConstantsProvider",
    "ValidationService",
    "assemble_discrete",
    "build_lattice",
    "delta_constant",
    "evaluate_eigenfunction",
    "evaluate_series",
    "expand",
    "expand_alpha0",
    "expand_alpha1",
    "expand_fractional",
    "fit_rate",
    "load_config",
    "secular_spectrum",
    "solve_corrector",
    "solve_homogeneous",
    "solve_inner_inhomogeneous",
    "solve_limit_spectrum",
    "solve_surrogate",
]
