"""Spatial sliced inverse regression for multivariate fields on regular grids."""

from .errors import (ConvergenceError, DegenerateResponseError, EmbeddingError,
                     NotPositiveDefiniteError, RankError, SsirError)
from .estimator import SelectionResult, SsirFit, lambda_values, select, ssir_fit
from .grid import GridShape, MultiField, ScalarField, inv_sqrt_sym, sample_mean_cov, whiten
from .io import (fit_report, format_lambda_table, parse_lambda_table, read_field,
                 validate_report, write_field)
from .jointdiag import JadResult, joint_diagonalize
from .metrics import projector, weighted_distance
from .moments import (FIRST, FIRST2, ONSITE, SE, Lag, LaggedMoment, LagSet, lagged_moment,
                      lagged_moments, load_lagset, parse_lag_text, resolve_lagset)
from .simulate import (ExpCovParams, SimOutput, SimSpec, simulate_grf, simulate_grf_dense,
                       simulate_model)
from .slicing import SliceAssignment, slice_response
from .study import StudyConfig, StudySummary, run_study

__version__ = "0.1.0"
