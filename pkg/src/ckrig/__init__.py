"""Kriging under white noise with polynomial trends, continued to complex points.

The estimator of the trend at an evaluation point is the best linear
unbiased combination of the observations.  For a linear trend the variance
of that estimator, read as a bilinear quadratic in the point, has a
conjugate pair of complex roots built from the covariate moments; evaluating
the predictor there yields complex-valued mean and variance statistics whose
real parts are the classical ones.  This package provides the linear-algebra
core, the complex-point statistics, Monte-Carlo validation machinery, and a
CLI.
"""

from .kriging import (
    DegenerateDesign,
    DesignMatrix,
    EmptySample,
    GramConditionWarning,
    KrigingSolution,
    LengthMismatch,
    Sample,
    TrendBasis,
    UnsupportedComplexBasis,
    build_design,
    feature_vector,
    gls_beta,
    kriging_weights,
    predict,
    prediction_error_variance,
    trend_variance,
)
from .moments import (
    ComplexMoments,
    DegenerateCovariates,
    IndexMoments,
    complex_mean,
    complex_variance,
    constant_mean_variance,
    imaginary_standard_error,
    index_moments,
    real_standard_error,
    slope,
    zero_variance_points,
)
from .numerics import ConjugatePair, NotPositiveDefinite, solve_spd
from .validation import (
    MonteCarloReport,
    SimulationConfig,
    SingularSystem,
    kkt_solve,
    monte_carlo_mse,
    simulate_process,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexMoments",
    "ConjugatePair",
    "DegenerateCovariates",
    "DegenerateDesign",
    "DesignMatrix",
    "EmptySample",
    "GramConditionWarning",
    "IndexMoments",
    "KrigingSolution",
    "LengthMismatch",
    "MonteCarloReport",
    "NotPositiveDefinite",
    "Sample",
    "SimulationConfig",
    "SingularSystem",
    "TrendBasis",
    "UnsupportedComplexBasis",
    "build_design",
    "complex_mean",
    "complex_variance",
    "constant_mean_variance",
    "feature_vector",
    "gls_beta",
    "imaginary_standard_error",
    "index_moments",
    "kkt_solve",
    "kriging_weights",
    "monte_carlo_mse",
    "predict",
    "prediction_error_variance",
    "real_standard_error",
    "simulate_process",
    "slope",
    "solve_spd",
    "trend_variance",
    "zero_variance_points",
]
