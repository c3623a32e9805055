"""Best linear unbiased prediction under white noise with a polynomial trend.

The observations are modelled as a known trend (constant, linear, or
user-supplied basis columns) plus zero-mean stationary noise.  The predictor
at an evaluation point is the weighted combination of observations whose
weights minimize the prediction error variance subject to unbiasedness; the
weights, the Lagrange multipliers of the constraint, the generalized
least-squares trend coefficients, and the trend variance all come out of one
small SPD system built from the design matrix.

Evaluation points may be complex.  Every quadratic form in this module is
bilinear (plain transposition, no conjugation): that is the analytic
continuation under which the trend variance has complex roots, and it is
deliberate.  A Hermitian form would be strictly positive at those roots.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import NotPositiveDefinite, solve_spd

# Warn (do not fail) when the trend Gram matrix is worse conditioned than this.
GRAM_CONDITION_LIMIT = 1e8

CORRELATION_SYMMETRY_RTOL = 1e-12
CORRELATION_DIAGONAL_ATOL = 1e-12


class EmptySample(ValueError):
    """Raised when covariates or observations are empty."""


class DegenerateDesign(ValueError):
    """Raised when the trend design is rank deficient (e.g. all covariates equal)."""


class UnsupportedComplexBasis(ValueError):
    """Raised when a column basis is asked for a feature at a complex point."""


class LengthMismatch(ValueError):
    """Raised when observations do not match the weight vector length."""


class GramConditionWarning(RuntimeWarning):
    """Emitted when the trend Gram matrix condition estimate exceeds the guard."""


@dataclass(frozen=True)
class Sample:
    """Paired covariates and observations, both real and of equal length."""

    covariates: np.ndarray
    observations: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.covariates, dtype=float))
        v = np.atleast_1d(np.asarray(self.observations, dtype=float))
        if x.size == 0:
            raise EmptySample("sample is empty")
        if x.shape != v.shape or x.ndim != 1:
            raise LengthMismatch(
                f"covariates {x.shape} and observations {v.shape} must be equal-length vectors"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("sample values must be finite")
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "covariates", x)
        object.__setattr__(self, "observations", v)

    @property
    def n(self) -> int:
        return self.covariates.size


@dataclass(frozen=True)
class TrendBasis:
    """The regression functions of the trend.

    ``constant`` fits a single mean level, ``linear`` an intercept plus
    slope.  ``columns`` takes arbitrary user functions of the covariate;
    such bases are restricted to real evaluation points unless the caller
    supplies feature values directly.
    """

    kind: str
    functions: tuple = field(default=(), repr=False)

    _KINDS = ("constant", "linear", "columns")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}, got {self.kind!r}")
        if self.kind == "columns" and len(self.functions) == 0:
            raise ValueError("columns basis needs at least one function")

    @classmethod
    def constant(cls) -> "TrendBasis":
        return cls("constant")

    @classmethod
    def linear(cls) -> "TrendBasis":
        return cls("linear")

    @classmethod
    def columns(cls, *functions: Callable[[float], float]) -> "TrendBasis":
        return cls("columns", tuple(functions))

    @property
    def k(self) -> int:
        if self.kind == "constant":
            return 1
        if self.kind == "linear":
            return 2
        return len(self.functions)


@dataclass(frozen=True)
class DesignMatrix:
    """The n-by-k matrix of trend basis values at the sample covariates."""

    F: np.ndarray
    basis: TrendBasis

    @property
    def n(self) -> int:
        return self.F.shape[0]

    @property
    def k(self) -> int:
        return self.F.shape[1]


@dataclass(frozen=True)
class KrigingSolution:
    """Weights, multipliers and the variance quadratic for one evaluation point.

    ``weights`` applied to the observations give the prediction;
    ``multipliers`` are the Lagrange multipliers of the unbiasedness
    constraint; ``variance_factor`` is the bilinear quadratic f'(F'Λ⁻¹F)⁻¹f
    whose product with the noise variance is the trend variance.
    ``beta_hat`` is filled when observations were supplied to the solver.
    """

    weights: np.ndarray
    multipliers: np.ndarray
    variance_factor: complex
    beta_hat: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def build_design(basis: TrendBasis, covariates) -> DesignMatrix:
    """Evaluate the trend basis at every covariate.

    Constant gives a column of ones, linear the columns [1, x]; a columns
    basis evaluates each user function per covariate.
    """
    x = np.atleast_1d(np.asarray(covariates, dtype=float))
    if x.size == 0:
        raise EmptySample("no covariates")
    if x.ndim != 1:
        raise ValueError("covariates must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise ValueError("covariates must be finite")

    if basis.kind == "constant":
        F = np.ones((x.size, 1))
    elif basis.kind == "linear":
        F = np.column_stack([np.ones(x.size), x])
    else:
        F = np.column_stack([[float(fn(xi)) for xi in x] for fn in basis.functions])
    F.flags.writeable = False
    return DesignMatrix(F=F, basis=basis)


def feature_vector(basis: TrendBasis, point) -> np.ndarray:
    """Trend basis values at a single (possibly complex) evaluation point.

    Constant yields (1,), linear (1, point).  Column bases have no implied
    complex extension, so a nonzero imaginary part raises
    :class:`UnsupportedComplexBasis`; real points evaluate the user columns.
    """
    z = complex(point)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError("evaluation point must be finite")
    if basis.kind == "constant":
        return np.array([1.0])
    if basis.kind == "linear":
        if z.imag == 0.0:
            return np.array([1.0, z.real])
        return np.array([1.0, z])
    if z.imag != 0.0:
        raise UnsupportedComplexBasis(
            "column bases are only defined at real points; supply complex "
            "feature values directly if the extension is known"
        )
    return np.array([float(fn(z.real)) for fn in basis.functions])


def _check_correlation(corr, n: int) -> np.ndarray:
    lam = np.asarray(corr, dtype=float)
    if lam.shape != (n, n):
        raise ValueError(f"correlation matrix must be {n}x{n}, got {lam.shape}")
    if not np.all(np.isfinite(lam)):
        raise ValueError("correlation matrix must be finite")
    scale = float(np.max(np.abs(lam)))
    if float(np.max(np.abs(lam - lam.T))) > CORRELATION_SYMMETRY_RTOL * max(scale, 1.0):
        raise ValueError("correlation matrix must be symmetric")
    if float(np.max(np.abs(np.diagonal(lam) - 1.0))) > CORRELATION_DIAGONAL_ATOL:
        raise ValueError("correlation matrix must have a unit diagonal")
    return lam


def _whitened_design(design: DesignMatrix, corr) -> tuple[np.ndarray, np.ndarray]:
    """Return (Λ⁻¹F, F'Λ⁻¹F) with the identity shortcut for ``corr=None``."""
    F = design.F
    if corr is None:
        lam_inv_F = F
    else:
        lam = _check_correlation(corr, design.n)
        lam_inv_F = solve_spd(lam, F)
    gram = F.T @ lam_inv_F
    # Symmetrize: the solve leaves roundoff-level asymmetry behind.
    gram = 0.5 * (gram + gram.T)
    return lam_inv_F, gram


def _gram_solve(gram: np.ndarray, rhs) -> np.ndarray:
    try:
        return solve_spd(gram, rhs)
    except NotPositiveDefinite as exc:
        raise DegenerateDesign(
            "trend design is rank deficient; distinct covariates (and n >= k) are required"
        ) from exc


def _warn_if_ill_conditioned(gram: np.ndarray) -> None:
    # Called only after a successful solve: degenerate designs raise instead.
    cond = np.linalg.cond(gram)
    if np.isfinite(cond) and cond > GRAM_CONDITION_LIMIT:
        warnings.warn(
            f"trend Gram matrix condition {cond:.2e} exceeds {GRAM_CONDITION_LIMIT:.0e}; "
            "results may lose accuracy",
            GramConditionWarning,
            stacklevel=3,
        )


def gls_beta(design: DesignMatrix, corr, obs) -> np.ndarray:
    """Generalized least-squares trend coefficients.

    Solves the normal equations (F'Λ⁻¹F) β = F'Λ⁻¹v.  ``corr=None`` means
    white noise (identity correlation).

    Raises
    ------
    DegenerateDesign
        When the Gram matrix is numerically singular, e.g. a linear trend
        with all covariates equal, or fewer observations than coefficients.
    """
    v = np.atleast_1d(np.asarray(obs, dtype=float))
    if v.shape != (design.n,):
        raise LengthMismatch(f"expected {design.n} observations, got {v.shape}")
    lam_inv_F, gram = _whitened_design(design, corr)
    beta = _gram_solve(gram, lam_inv_F.T @ v)
    _warn_if_ill_conditioned(gram)
    return beta


def kriging_weights(design: DesignMatrix, corr, feature, obs=None) -> KrigingSolution:
    """Solve the unbiasedness-constrained minimum-variance weight problem.

    Closed form: weights Λ⁻¹F(F'Λ⁻¹F)⁻¹f, multipliers -(F'Λ⁻¹F)⁻¹f, and the
    variance factor f'(F'Λ⁻¹F)⁻¹f evaluated bilinearly.  The feature vector
    may be complex, in which case weights and multipliers are complex and the
    prediction is the analytic continuation of the real predictor.

    Parameters
    ----------
    design : DesignMatrix
    corr : (n, n) array_like or None
        Noise auto-correlation matrix; ``None`` is the identity (white noise).
    feature : (k,) array_like, real or complex
        Trend basis values at the evaluation point.
    obs : (n,) array_like, optional
        When given, the GLS coefficients are solved as well and stored on the
        returned solution.
    """
    f = np.atleast_1d(np.asarray(feature))
    if f.shape != (design.k,):
        raise LengthMismatch(f"feature vector must have length {design.k}, got {f.shape}")
    lam_inv_F, gram = _whitened_design(design, corr)

    gram_inv_f = _gram_solve(gram, f)
    _warn_if_ill_conditioned(gram)
    weights = lam_inv_F @ gram_inv_f
    multipliers = -gram_inv_f
    variance_factor = complex(f @ gram_inv_f)

    beta_hat = None
    if obs is not None:
        v = np.atleast_1d(np.asarray(obs, dtype=float))
        if v.shape != (design.n,):
            raise LengthMismatch(f"expected {design.n} observations, got {v.shape}")
        beta_hat = _gram_solve(gram, lam_inv_F.T @ v)

    return KrigingSolution(
        weights=weights,
        multipliers=multipliers,
        variance_factor=variance_factor,
        beta_hat=beta_hat,
    )


def predict(solution: KrigingSolution, obs) -> complex:
    """Apply the kriging weights to the observations.

    Equals the trend fit evaluated at the feature vector, f'β̂, up to solve
    accuracy.
    """
    v = np.atleast_1d(np.asarray(obs, dtype=float))
    if v.shape != solution.weights.shape:
        raise LengthMismatch(
            f"expected {solution.weights.shape[0]} observations, got {v.shape}"
        )
    return complex(np.dot(solution.weights, v))


def trend_variance(solution: KrigingSolution, sigma2: float = 1.0) -> complex:
    """Variance of the fitted trend at the evaluation point: σ²·f'(F'Λ⁻¹F)⁻¹f.

    Bilinear in the feature vector, so it vanishes at the complex roots of
    the variance quadratic rather than staying positive.
    """
    if not (np.isfinite(sigma2) and sigma2 >= 0.0):
        raise ValueError("sigma2 must be finite and non-negative")
    return complex(sigma2 * solution.variance_factor)


def prediction_error_variance(solution: KrigingSolution, corr, sigma2: float = 1.0) -> complex:
    """Noise prediction error second moment σ²(1 + ω'Λω), bilinear form."""
    if not (np.isfinite(sigma2) and sigma2 >= 0.0):
        raise ValueError("sigma2 must be finite and non-negative")
    w = solution.weights
    if corr is None:
        quad = np.dot(w, w)
    else:
        lam = _check_correlation(corr, w.shape[0])
        quad = np.dot(w, lam @ w)
    return complex(sigma2 * (1.0 + quad))
