"""Simulation, smoothness estimation and volatility tests for rough
moving-average (Brownian semistationary) processes with a gamma kernel."""

from .error import ErrorBreakdown, error_curve, error_terms
from .estimate import (AlphaTestResult, CofEstimate, Lambda2Matrix,
                       cof_estimate, fgn_rho, lambda2_matrix, lambda2_scalar,
                       normal_abs_moment, second_diff_rho, test_alpha)
from .exceptions import (CholeskyError, DegenerateError, DomainError,
                         GridError, LengthError, SemistatError,
                         SingularityError)
from .kernel import (GammaKernelParams, ProcessMoments, acvf_gamma,
                     gaussian_core_scale, kernel_eval, matern_rho)
from .mc_harness import (ExperimentConfig, McSummary, config_from_dict,
                         config_hash, config_to_dict, negbias_curve,
                         run_experiment)
from .simulate import (ConstantVol, ExpOuVol, RngSeed, SamplePath, SimGrid,
                       exact_gaussian_paths, simulate_convolution,
                       simulate_exact_gaussian, simulate_volatility, subsample)
from .specfun import bessel_k, gamma_fn, lower_incomplete_gamma
from .variation import (PowerVariation, RrvPath, first_order_variation,
                        grid_index, power_variation, rrv, second_diff)
from .voltest import (RrvCi, VolTestResult, bridge_critical_values, cvm_cdf,
                      cvm_quantile, mc_bridge_table, rrv_confidence,
                      rrv_variance, vol_test, write_bridge_table)

__version__ = "0.1.0"

__all__ = [
    "AlphaTestResult", "CholeskyError", "CofEstimate", "ConstantVol",
    "DegenerateError", "DomainError", "ErrorBreakdown", "ExperimentConfig",
    "ExpOuVol", "GammaKernelParams", "GridError", "Lambda2Matrix",
    "LengthError", "McSummary", "PowerVariation", "ProcessMoments", "RngSeed",
    "RrvCi", "RrvPath", "SamplePath", "SemistatError", "SimGrid",
    "SingularityError", "VolTestResult", "acvf_gamma", "bessel_k",
    "bridge_critical_values", "cof_estimate", "config_from_dict",
    "config_hash", "config_to_dict", "cvm_cdf", "cvm_quantile", "error_curve",
    "error_terms", "exact_gaussian_paths", "fgn_rho", "first_order_variation",
    "gamma_fn", "gaussian_core_scale", "grid_index", "kernel_eval",
    "lambda2_matrix", "lambda2_scalar", "lower_incomplete_gamma",
    "matern_rho", "mc_bridge_table", "negbias_curve", "normal_abs_moment",
    "power_variation", "rrv", "rrv_confidence", "rrv_variance",
    "run_experiment", "second_diff", "second_diff_rho",
    "simulate_convolution", "simulate_exact_gaussian", "simulate_volatility",
    "subsample", "test_alpha", "vol_test", "write_bridge_table",
]
