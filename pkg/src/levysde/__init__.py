"""Simulation and maximum-likelihood reconstruction of SDEs driven by
alpha-stable Levy noise."""

__version__ = "0.1.0"

from .analysis import (
    KsResult,
    PotentialCurve,
    effective_potential,
    find_potential_minima,
    ks_residual_test,
    model_report,
)
from .errors import (
    ConfigurationError,
    DataError,
    LevySdeError,
    NumericalError,
    OptimizationError,
    ParameterError,
    QuadratureError,
    SimulationError,
)
from .estimate import (
    FitOptions,
    FitResult,
    fit_mle,
    initialize_params,
    observed_information,
    standard_errors,
    two_pass_fit,
)
from .likelihood import (
    Residuals,
    TimeSeries,
    compute_residuals,
    log_likelihood,
    transition_log_density,
)
from .models import (
    ConstantNoise,
    LotkaVolterraDrift,
    ModelSpec,
    MultinomialDrift,
    ParamVector,
    PolynomialDrift,
    PolynomialNoise,
    SplineDrift,
    SplineNoise,
    eval_drift,
    eval_noise,
    pack_params,
    spline_eval,
    unpack_params,
)
from .simulate import SimConfig, euler_step, simulate_path
from .stable import (
    DensityGrid,
    StableParams,
    build_density_grid,
    stable_cdf,
    stable_log_pdf,
    stable_pdf_oracle,
    stable_sample,
)
