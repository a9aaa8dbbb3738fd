"""ARMA pole estimation from higher-order zero-crossing counts.

Stream samples into a :class:`HocState`, turn its normalized counts into
autocorrelation lags, solve the modified Yule-Walker equations for the AR
denominator and inspect the resulting poles and damping ratios.
"""

from ._backend import BACKEND
from .crossings import EwmaState, HocConfig, HocCounts, HocState, ewma_update, merge, snapshot
from .errors import (ConfigMismatchError, DataError, HocPolesError, IllConditionedError,
                     ModelError, NumericalError, RootFindingError, UndefinedDampingError,
                     UnstableModelError)
from .hoc_acf import AcfSequence, acf_from_hoc, hoc_from_acf, next_lag, psi_phi
from .model_sim import (ArmaSpec, ClosedLoopSpec, NoiseConfig, analytic_acf,
                        closed_loop_to_arma, generate_arma, true_poles)
from .myw import DenominatorEstimate, batch_acf, prediction_rmse, solve_myw
from .pipeline import Report, RunConfig, estimate_from_counts, estimate_series
from .poles import PoleReport, assess, damping, find_roots, to_continuous

__version__ = "0.1.0"
