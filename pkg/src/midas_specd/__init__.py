"""Durbin-Wu-Hausman tests of fixed-weight aggregation against MIDAS weights."""
from ._kernels import BACKEND
from .covariance import (HacOptions, MomentEstimates, hac_long_run_cov, newey_west_bandwidth,
                         null_ls_cov, tsls_cov)
from .dataio import load_sample, save_sample
from .dgp import DgpSpec, cell_id, derive_replication_seed, simulate
from .exceptions import (BandwidthTooLarge, DataError, DegenerateInstruments, DegenerateNull,
                         DimensionMismatch, InvalidParameter, MidasSpecError, MissingValue,
                         ParseError, RaggedPeriod, RankDeficient)
from .harness import GridConfig, RejectionTable, preset, render_table, run_grid
from .oracle import (RegressorCovariance, expected_instrument_score,
                     monte_carlo_instrument_score, phi_matrix, population_null_coefficients)
from .regression import FitResult, annihilate, fwl_coefficient, ols_fit, project
from .spectests import (Diagnostic, PreparedTests, TestInputs, TestOutcome, agk_test,
                        dwh_new_test, lambda_t_test, miller_vat_test, run_tests, upper_tail_p)
from .weights import (MixedSample, WeightVector, aggregate, build_instruments,
                      end_of_period_weights, flat_weights, instrument_weights, midas_weights,
                      parse_null)

__version__ = "0.1.0"
