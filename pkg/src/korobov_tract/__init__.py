"""Spectra, information complexity and EC-tractability for approximation in analytic Korobov spaces."""

from .approx import (GaussianDrawConfig, MCResult, SpectralFunction, h_norm, l2_norm, mc_avg_error,
                     sample_gaussian, truncate, truncate_weighted, worst_case_error_of_truncation)
from .caps import Caps, default_caps, parse_caps
from .complexity import (Criterion, TraceBound, avg_error, count_lattice, error_curve,
                         info_complexity_avg, info_complexity_worst, initial_avg_error,
                         initial_error_log_bounds, m_constant, threshold, trace_tau, worst_error)
from .entropy import (ChainCheck, LpBallQuery, chain_check, covering_log_bound, covering_min,
                      fit_lemma_constant, grid_count, grid_count_by_dimension, grid_count_log_bound,
                      packing_max)
from .errors import ConvergenceError, KorobovError, ResourceCapError, SpecError
from .lattice import count_weighted
from .sequences import SequenceFamily, ValidationReport, WeightSpec, b_star, eval_a, eval_b, validate
from .spectrum import (EigenStream, Exponent, brute_force_spectrum, exponent, one_dim_eigenvalue,
                       top_eigenvalues, top_exponents, top_frequencies)
from .tractability import (LimitClass, Outcome, ProbeTable, TractabilityQuery, Verdict, classify,
                           limit_eval, probe_ratio)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
