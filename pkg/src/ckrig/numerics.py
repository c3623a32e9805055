"""Small dense linear-algebra kernels and conjugate-pair values.

Everything here is shared plumbing: a guarded Cholesky solve for the
symmetric positive-definite systems that appear in the trend fits, and a
two-branch container for complex results that come in conjugate pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

# Relative symmetry slack accepted on input matrices.
SYMMETRY_RTOL = 1e-12
# A Cholesky pivot at or below this fraction of the largest diagonal entry
# is treated as a degenerate (not positive definite) system.
PIVOT_RTOL = 1e-14


class NotPositiveDefinite(ValueError):
    """Raised when a matrix expected to be SPD fails the pivot guard."""


@dataclass(frozen=True)
class ConjugatePair:
    """A complex value together with its opposite-branch twin.

    ``plus`` is the branch built with the positive imaginary contribution;
    for real input data ``minus`` is exactly its complex conjugate.
    """

    plus: complex
    minus: complex

    @classmethod
    def from_plus(cls, value: complex) -> "ConjugatePair":
        value = complex(value)
        return cls(plus=value, minus=value.conjugate())

    def branch(self, name: str) -> complex:
        if name == "plus":
            return self.plus
        if name == "minus":
            return self.minus
        raise ValueError(f"unknown branch {name!r}")


def _cholesky_lower(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of ``a`` with an explicit pivot guard.

    Unlike the library factorizations, this flags *near*-degenerate systems:
    any pivot at or below ``PIVOT_RTOL`` times the largest diagonal entry
    raises :class:`NotPositiveDefinite` instead of silently amplifying noise.
    """
    n = a.shape[0]
    tol = PIVOT_RTOL * float(np.max(np.diagonal(a)))
    lower = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if not np.isfinite(pivot) or pivot <= tol:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at index {j} is within {PIVOT_RTOL:g} of the "
                "largest diagonal entry; the system is numerically degenerate"
            )
        lower[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_spd(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` for symmetric positive-definite ``a``.

    Parameters
    ----------
    a : (k, k) array_like, real, symmetric within ``SYMMETRY_RTOL`` relative
    b : (k,) or (k, m) array_like, real or complex

    Returns
    -------
    x with the shape and (promoted) dtype of ``b``.

    Raises
    ------
    NotPositiveDefinite
        If a Cholesky pivot falls at or below the relative guard; this is
        the signal for a rank-deficient trend design.
    ValueError
        For non-square or materially asymmetric input.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(a - a.T))) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric within tolerance")

    b = np.asarray(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if not np.iscomplexobj(b):
        b = b.astype(float, copy=False)

    lower = _cholesky_lower(a)
    y = solve_triangular(lower, b, lower=True)
    return solve_triangular(lower.T, y, lower=False)
