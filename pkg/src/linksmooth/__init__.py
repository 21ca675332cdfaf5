"""Kernel smoothing for symmetric pair outcomes (link regression).

The estimator averages outcomes observed on node pairs with product-kernel
weights plus an additive regularizer; companion modules generate fixed and
random covariate designs, sample synthetic outcomes, and run replicated
experiments that measure how the estimate's variance decays with the number
of nodes under each design.
"""

__version__ = "0.1.0"

from .design import CovariateSet, DesignSpec, generate, generate_fixed, generate_random, verify_spacing
from .estimators import ConventionalKernelSmoother, LinkKernelSmoother
from .kernels import KernelSpec, evaluate, evaluate_scaled, get_kernel
from .models import LinkModel, get_model, sample_outcomes, sample_outcomes_node_effect
from .montecarlo import (
    ConventionalConfig,
    DecompositionEstimate,
    ExperimentConfig,
    run_conventional_comparison,
    run_decomposition,
    run_histogram,
)
from .rates import (
    RateFit,
    Schedule,
    bandwidth,
    fit_slope,
    predicted_risk_exponent,
    predicted_variance_exponent,
    run_rate_study,
)
from .smoother import (
    EmptyNeighborhoodError,
    SmootherConfig,
    SmootherDiagnostics,
    conditional_mean,
    conventional_smooth,
    diagnostics,
    link_smooth,
    link_smooth_weights,
)

__all__ = [
    "__version__",
    "CovariateSet",
    "DesignSpec",
    "generate",
    "generate_fixed",
    "generate_random",
    "verify_spacing",
    "ConventionalKernelSmoother",
    "LinkKernelSmoother",
    "KernelSpec",
    "evaluate",
    "evaluate_scaled",
    "get_kernel",
    "LinkModel",
    "get_model",
    "sample_outcomes",
    "sample_outcomes_node_effect",
    "ConventionalConfig",
    "DecompositionEstimate",
    "ExperimentConfig",
    "run_conventional_comparison",
    "run_decomposition",
    "run_histogram",
    "RateFit",
    "Schedule",
    "bandwidth",
    "fit_slope",
    "predicted_risk_exponent",
    "predicted_variance_exponent",
    "run_rate_study",
    "EmptyNeighborhoodError",
    "SmootherConfig",
    "SmootherDiagnostics",
    "conditional_mean",
    "conventional_smooth",
    "diagnostics",
    "link_smooth",
    "link_smooth_weights",
]
