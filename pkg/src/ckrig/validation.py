"""Independent cross-checks for the closed-form kriging solution.

``kkt_solve`` solves the stationarity-plus-unbiasedness equations as one
bordered linear system, with none of the closed forms, so it can referee
them.  The Monte-Carlo driver simulates the trend-plus-white-noise model
with per-replicate RNG substreams and measures the empirical error moments
of the predictor at any (real or complex) evaluation point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kriging import (
    DesignMatrix,
    Sample,
    TrendBasis,
    _check_correlation,
    build_design,
    feature_vector,
    kriging_weights,
    predict,
)

KKT_RESIDUAL_TOL = 1e-9

_NOISE_KINDS = ("gaussian", "uniform")


class SingularSystem(ValueError):
    """Raised when the bordered system cannot be solved to tolerance."""


@dataclass(frozen=True)
class SimulationConfig:
    """Trend-plus-noise model to replicate: observations = F·beta + noise."""

    covariates: tuple
    beta: tuple
    sigma: float
    replicates: int
    seed: int
    noise_kind: str = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(float(c) for c in self.covariates))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if len(self.beta) not in (1, 2):
            raise ValueError("beta must have one (constant) or two (linear) entries")
        if not (np.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError("sigma must be finite and non-negative")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.noise_kind not in _NOISE_KINDS:
            raise ValueError(f"noise_kind must be one of {_NOISE_KINDS}")

    @property
    def n(self) -> int:
        return len(self.covariates)

    @property
    def basis(self) -> TrendBasis:
        return TrendBasis.constant() if len(self.beta) == 1 else TrendBasis.linear()


@dataclass(frozen=True)
class MonteCarloReport:
    """Empirical moments of the prediction error over the replicates.

    Variances and the covariance use the 1/R convention.  ``bilinear_mse``
    is the mean of the *bilinear* square of the complex error, the quantity
    that vanishes at the zero-variance points.
    """

    mean_error_re: float
    mean_error_im: float
    var_re: float
    var_im: float
    cov_re_im: float
    bilinear_mse: complex
    replicates_used: int


def kkt_solve(design: DesignMatrix, corr, feature) -> tuple[np.ndarray, np.ndarray]:
    """Weights and multipliers from the raw bordered system.

    Stacks Λω + Fμ = 0 over F'ω = f into one (n+k)-square solve and checks
    the residuals, avoiding every closed form used by ``kriging_weights``.
    """
    F = design.F
    n, k = F.shape
    f = np.atleast_1d(np.asarray(feature))
    if f.shape != (k,):
        raise ValueError(f"feature vector must have length {k}")
    lam = np.eye(n) if corr is None else _check_correlation(corr, n)

    bordered = np.zeros((n + k, n + k))
    bordered[:n, :n] = lam
    bordered[:n, n:] = F
    bordered[n:, :n] = F.T
    rhs = np.zeros(n + k, dtype=np.result_type(f.dtype, float))
    rhs[n:] = f

    try:
        solution = np.linalg.solve(bordered.astype(rhs.dtype), rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("bordered kriging system is singular") from exc

    weights, multipliers = solution[:n], solution[n:]
    scale = max(1.0, float(np.max(np.abs(f))), float(np.max(np.abs(lam))))
    stationarity = np.max(np.abs(lam @ weights + F @ multipliers))
    unbiasedness = np.max(np.abs(F.T @ weights - f))
    if max(stationarity, unbiasedness) > KKT_RESIDUAL_TOL * scale:
        raise SingularSystem(
            f"bordered system residual {max(stationarity, unbiasedness):.3e} "
            f"exceeds {KKT_RESIDUAL_TOL:g}; the design is rank deficient"
        )
    return weights, multipliers


@lru_cache(maxsize=8)
def _base_bitgen(seed: int) -> np.random.Philox:
    return np.random.Philox(key=seed)


def _replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    # Counter-based substream: jump the Philox counter by replicate blocks of
    # 2**128 draws, so replicate r's stream depends only on (seed, r) and is
    # identical under any execution order or batching.  jumped() leaves the
    # cached base untouched.
    return np.random.Generator(_base_bitgen(seed).jumped(replicate))


@lru_cache(maxsize=8)
def _trend(config: SimulationConfig) -> np.ndarray:
    trend = build_design(config.basis, np.asarray(config.covariates)).F @ np.asarray(config.beta)
    trend.flags.writeable = False
    return trend


def simulate_process(config: SimulationConfig, replicate: int = 0) -> Sample:
    """One realization of the model, deterministic in (seed, replicate)."""
    x = np.asarray(config.covariates)
    trend = _trend(config)
    rng = _replicate_rng(config.seed, replicate)
    if config.noise_kind == "gaussian":
        noise = config.sigma * rng.standard_normal(x.size)
    else:
        # Uniform on [-a, a] with a = sigma*sqrt(3) has variance sigma^2.
        half_width = config.sigma * np.sqrt(3.0)
        noise = rng.uniform(-half_width, half_width, x.size)
    return Sample(covariates=x, observations=trend + noise)


def monte_carlo_mse(config: SimulationConfig, evaluation_point) -> MonteCarloReport:
    """Empirical error moments of the predictor at ``evaluation_point``.

    Per replicate: simulate, fit, predict, and record the error against the
    true trend value at the point.  The reduction runs in replicate order,
    so the report is identical under any execution schedule.
    """
    point = complex(evaluation_point)
    basis = config.basis
    design = build_design(basis, np.asarray(config.covariates))
    f = feature_vector(basis, point)
    solution = kriging_weights(design, None, f)
    truth = complex(f @ np.asarray(config.beta))

    errors = np.empty(config.replicates, dtype=complex)
    for r in range(config.replicates):
        sample = simulate_process(config, r)
        errors[r] = predict(solution, sample.observations) - truth

    re, im = errors.real, errors.imag
    mean_re, mean_im = float(np.mean(re)), float(np.mean(im))
    re_c, im_c = re - mean_re, im - mean_im
    return MonteCarloReport(
        mean_error_re=mean_re,
        mean_error_im=mean_im,
        var_re=float(np.mean(re_c * re_c)),
        var_im=float(np.mean(im_c * im_c)),
        cov_re_im=float(np.mean(re_c * im_c)),
        bilinear_mse=complex(np.mean(errors * errors)),
        replicates_used=config.replicates,
    )
