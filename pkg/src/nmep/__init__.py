"""Signed-ensemble quantum trajectories for time-local master equations."""

from .core import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    apply,
    canonical_phase,
    hermitian_eig2,
    min_eigenvalue,
    normalize,
)
from .ensemble import EnsembleMember, SignedEnsemble, consolidate, density_matrix, expectation
from .errors import NMEPError
from .reference import ReferenceConfig, compare_series, generator_rhs, positivity_report, rk4_run, series_positivity
from .series import TimeSeries, read_series
from .solvers import SolverConfig, StepRandomness, mcwf_step, nmep_step, nmqj_step, run

__version__ = "0.1.0"

__all__ = [
    "EnsembleMember",
    "NMEPError",
    "ReferenceConfig",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SignedEnsemble",
    "SolverConfig",
    "StepRandomness",
    "TimeSeries",
    "apply",
    "canonical_phase",
    "compare_series",
    "consolidate",
    "density_matrix",
    "expectation",
    "generator_rhs",
    "hermitian_eig2",
    "mcwf_step",
    "min_eigenvalue",
    "nmep_step",
    "nmqj_step",
    "normalize",
    "positivity_report",
    "read_series",
    "rk4_run",
    "run",
    "series_positivity",
]
