"""Probability of failure on demand for MooN safety systems under
partial and full proof-test policies: exact and approximate PFD math,
parameter estimation from test records, test-schedule optimization, and a
Monte Carlo reference implementation.
"""

from ._kernels import active_backend_name, available_backends
from .estimation import (
    DEFAULT_CONFIDENCE_LEVEL,
    Estimate,
    EstimationResult,
    ObservationModelError,
    UndefinedEstimateError,
    binomial_ci,
    empirical_obs,
    estimate_all,
    estimate_efficiency,
    estimate_lambda,
    predicted_obs,
)
from .models import (
    HOURS_PER_MONTH,
    HOURS_PER_YEAR,
    ObservationSet,
    SystemSpec,
    TestPolicy,
)
from .optimize import (
    OptimizationResult,
    PolicyComparison,
    SolverSettings,
    compare_policies,
    optimize_schedule,
)
from .pfd import (
    ApproximationDomainWarning,
    PfdReport,
    component_availability,
    component_availability_approx,
    evaluate_policy,
    max_unavailability,
    pfd_avg,
    pfd_avg_approx,
    pfd_avg_no_partial,
    pfd_interval,
    pfd_interval_approx,
    s_coefficient,
    s_coefficients,
    sample_curve,
    system_availability,
    system_availability_approx,
    system_availability_direct,
    system_unavailability,
)
from .sil import SilBand, classify_sil
from .simulate import (
    SimConfig,
    SimResult,
    empirical_curve,
    simulate_observations,
    simulate_system,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximationDomainWarning",
    "DEFAULT_CONFIDENCE_LEVEL",
    "Estimate",
    "EstimationResult",
    "HOURS_PER_MONTH",
    "HOURS_PER_YEAR",
    "ObservationModelError",
    "ObservationSet",
    "OptimizationResult",
    "PfdReport",
    "PolicyComparison",
    "SilBand",
    "SimConfig",
    "SimResult",
    "SolverSettings",
    "SystemSpec",
    "TestPolicy",
    "UndefinedEstimateError",
    "active_backend_name",
    "available_backends",
    "binomial_ci",
    "classify_sil",
    "compare_policies",
    "component_availability",
    "component_availability_approx",
    "empirical_curve",
    "empirical_obs",
    "estimate_all",
    "estimate_efficiency",
    "estimate_lambda",
    "evaluate_policy",
    "max_unavailability",
    "optimize_schedule",
    "pfd_avg",
    "pfd_avg_approx",
    "pfd_avg_no_partial",
    "pfd_interval",
    "pfd_interval_approx",
    "predicted_obs",
    "s_coefficient",
    "s_coefficients",
    "sample_curve",
    "simulate_observations",
    "simulate_system",
    "system_availability",
    "system_availability_approx",
    "system_availability_direct",
    "system_unavailability",
]
