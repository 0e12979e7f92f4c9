"""Structured prior precision matrices and the Gaussian coefficient draw.

Two builders produce the coefficient-prior precision ``Binv``:

* :func:`build_fused_precision` — tridiagonal; couples successive
  coefficients through per-difference scales ``lambda2[j]`` and a shared
  global scale ``tilde_tau2``.
* :func:`build_horses_precision` — dense; couples every coefficient pair
  through pairwise scales stored as the lower triangle in row-major order.

Both satisfy the quadratic-form identity

    beta' Binv beta = sum_j beta_j^2 / tau2_j
                      + (1/tilde_tau2) * sum_pairs (beta_j - beta_k)^2 / lambda2_{jk}

which the test suite checks against direct summation. ``*_via_differences``
variants assemble the same matrices from difference operators and exist as
an independent code path for cross-checking.

Scale latents are floored at ``SCALE_FLOOR`` before inversion so that
extreme shrinkage during burn-in can never produce infinite entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cholesky as _cholesky
from scipy.linalg import solve_triangular

from .errors import NumericalSingularityError, ParameterError
from .rng import RngStream

__all__ = [
    "SCALE_FLOOR",
    "PrecisionMatrix",
    "GaussianConditional",
    "pair_indices",
    "diagonal_precision",
    "build_fused_precision",
    "fused_precision_via_differences",
    "build_horses_precision",
    "horses_precision_via_differences",
    "beta_conditional",
    "sample_beta_conditional",
]

# 1e-300-safe bound applied to scale latents before taking reciprocals.
SCALE_FLOOR = 1e-12


@dataclass
class PrecisionMatrix:
    """Dense symmetric storage of a prior precision.

    ``bandwidth`` records the structural bandwidth (0 diagonal, 1
    tridiagonal, None dense); the dense array is authoritative either way.
    """

    matrix: np.ndarray
    bandwidth: int | None = None

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


@dataclass
class GaussianConditional:
    """Parameters of the multivariate-normal coefficient conditional."""

    mean: np.ndarray
    covariance: np.ndarray


def _check_positive_vector(name: str, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ParameterError(f"{name} must be a 1-d vector")
    if values.size and not np.all(values > 0):
        raise ParameterError(f"all entries of {name} must be strictly positive")
    return values


def _check_positive_scalar(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise ParameterError(f"{name} must be strictly positive, got {value!r}")
    return value


def _floored_inverse(values: np.ndarray) -> np.ndarray:
    return 1.0 / np.maximum(values, SCALE_FLOOR)


@lru_cache(maxsize=64)
def pair_indices(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower-triangle (row, col) index arrays in row-major order.

    Defines the canonical storage order of pairwise scales: (2,1), (3,1),
    (3,2), ... in 1-based labels. Treat the returned arrays as read-only.
    """
    ii, jj = np.tril_indices(p, -1)
    ii.setflags(write=False)
    jj.setflags(write=False)
    return ii, jj


def diagonal_precision(tau2: np.ndarray) -> PrecisionMatrix:
    """Precision diag(1/tau2): independent shrinkage, no fusion."""
    tau2 = _check_positive_vector("tau2", tau2)
    return PrecisionMatrix(np.diag(_floored_inverse(tau2)), bandwidth=0)


def build_fused_precision(tau2: np.ndarray, lambda2: np.ndarray, tilde_tau2: float) -> PrecisionMatrix:
    """Tridiagonal precision coupling successive coefficients.

    Diagonal entries are ``1/tau2_j`` plus the fusion weights of the adjacent
    differences; off-diagonal entries are ``-1/(lambda2_j * tilde_tau2)``.
    ``lambda2[k]`` is the scale of the difference between coefficients k and
    k+1 (0-based).
    """
    tau2 = _check_positive_vector("tau2", tau2)
    lambda2 = _check_positive_vector("lambda2", lambda2)
    tilde_tau2 = _check_positive_scalar("tilde_tau2", tilde_tau2)
    p = tau2.shape[0]
    if lambda2.shape[0] != p - 1:
        raise ParameterError(f"lambda2 must have length p-1={p-1}, got {lambda2.shape[0]}")

    w = 1.0 / (np.maximum(lambda2, SCALE_FLOOR) * max(tilde_tau2, SCALE_FLOOR))
    diag = _floored_inverse(tau2)
    if p > 1:
        diag[:-1] += w
        diag[1:] += w
    matrix = np.diag(diag)
    if p > 1:
        k = np.arange(p - 1)
        matrix[k, k + 1] = -w
        matrix[k + 1, k] = -w
    return PrecisionMatrix(matrix, bandwidth=1)


def fused_precision_via_differences(tau2: np.ndarray, lambda2: np.ndarray, tilde_tau2: float) -> np.ndarray:
    """Assemble the fused precision as diag(1/tau2) + D' W D.

    D is the first-difference operator; independent path used for checks.
    """
    tau2 = _check_positive_vector("tau2", tau2)
    lambda2 = _check_positive_vector("lambda2", lambda2)
    tilde_tau2 = _check_positive_scalar("tilde_tau2", tilde_tau2)
    p = tau2.shape[0]
    w = 1.0 / (np.maximum(lambda2, SCALE_FLOOR) * max(tilde_tau2, SCALE_FLOOR))
    D = np.zeros((p - 1, p))
    k = np.arange(p - 1)
    D[k, k] = -1.0
    D[k, k + 1] = 1.0
    return np.diag(_floored_inverse(tau2)) + D.T @ (w[:, None] * D)


def build_horses_precision(tau2: np.ndarray, lambda2_pairs: np.ndarray, tilde_tau2: float) -> PrecisionMatrix:
    """Dense precision coupling all coefficient pairs.

    ``lambda2_pairs`` holds the pairwise scales in :func:`pair_indices`
    order. The off-diagonal entries carry the global factor,
    ``-1/(lambda2_{jk} * tilde_tau2)``, matching the expansion of the
    pairwise penalty sum; the diagonal is ``1/tau2_i`` plus the row sum of
    those fusion weights.
    """
    tau2 = _check_positive_vector("tau2", tau2)
    lambda2_pairs = _check_positive_vector("lambda2_pairs", lambda2_pairs)
    tilde_tau2 = _check_positive_scalar("tilde_tau2", tilde_tau2)
    p = tau2.shape[0]
    m = p * (p - 1) // 2
    if lambda2_pairs.shape[0] != m:
        raise ParameterError(f"lambda2_pairs must have length p(p-1)/2={m}, got {lambda2_pairs.shape[0]}")

    ii, jj = pair_indices(p)
    w = 1.0 / (np.maximum(lambda2_pairs, SCALE_FLOOR) * max(tilde_tau2, SCALE_FLOOR))
    matrix = np.zeros((p, p))
    matrix[ii, jj] = -w
    matrix[jj, ii] = -w
    diag = _floored_inverse(tau2)
    np.add.at(diag, ii, w)
    np.add.at(diag, jj, w)
    matrix[np.arange(p), np.arange(p)] = diag
    return PrecisionMatrix(matrix, bandwidth=None)


def horses_precision_via_differences(tau2: np.ndarray, lambda2_pairs: np.ndarray, tilde_tau2: float) -> np.ndarray:
    """Assemble the pairwise precision as diag(1/tau2) + P' W P."""
    tau2 = _check_positive_vector("tau2", tau2)
    lambda2_pairs = _check_positive_vector("lambda2_pairs", lambda2_pairs)
    tilde_tau2 = _check_positive_scalar("tilde_tau2", tilde_tau2)
    p = tau2.shape[0]
    ii, jj = pair_indices(p)
    w = 1.0 / (np.maximum(lambda2_pairs, SCALE_FLOOR) * max(tilde_tau2, SCALE_FLOOR))
    P = np.zeros((ii.shape[0], p))
    rows = np.arange(ii.shape[0])
    P[rows, ii] = 1.0
    P[rows, jj] = -1.0
    return np.diag(_floored_inverse(tau2)) + P.T @ (w[:, None] * P)


def _cholesky_lower_with_jitter(A: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter before failing."""
    p = A.shape[0]
    trace = float(np.trace(A))
    base = 1e-10 * trace / p if trace > 0 else 1e-10
    attempted: list[float] = []
    for jitter in (0.0, base, 10.0 * base, 100.0 * base):
        attempted.append(jitter)
        try:
            target = A if jitter == 0.0 else A + jitter * np.eye(p)
            return _cholesky(target, lower=True)
        except np.linalg.LinAlgError:
            continue
    raise NumericalSingularityError(
        "Cholesky factorization failed for the coefficient conditional",
        jitters=tuple(attempted),
    )


def beta_conditional(XtX: np.ndarray, Xty: np.ndarray, Binv: PrecisionMatrix, sigma2: float) -> GaussianConditional:
    """Mean and covariance of the coefficient conditional.

    With A = X'X + Binv, the conditional is N(A^{-1} X'y, sigma2 * A^{-1}).
    """
    sigma2 = _check_positive_scalar("sigma2", sigma2)
    A = np.asarray(XtX, dtype=float) + Binv.matrix
    L = _cholesky_lower_with_jitter(A)
    u = solve_triangular(L, np.asarray(Xty, dtype=float), lower=True)
    mean = solve_triangular(L, u, lower=True, trans="T")
    Linv = solve_triangular(L, np.eye(A.shape[0]), lower=True)
    covariance = sigma2 * (Linv.T @ Linv)
    return GaussianConditional(mean=mean, covariance=covariance)


def sample_beta_conditional(
    XtX: np.ndarray,
    Xty: np.ndarray,
    Binv: PrecisionMatrix,
    sigma2: float,
    rng: RngStream,
) -> np.ndarray:
    """Exact draw from N(A^{-1} X'y, sigma2 * A^{-1}) with A = X'X + Binv."""
    sigma2 = _check_positive_scalar("sigma2", sigma2)
    A = np.asarray(XtX, dtype=float) + Binv.matrix
    L = _cholesky_lower_with_jitter(A)
    u = solve_triangular(L, np.asarray(Xty, dtype=float), lower=True)
    mean = solve_triangular(L, u, lower=True, trans="T")
    z = rng.standard_normal(A.shape[0])
    return mean + np.sqrt(sigma2) * solve_triangular(L, z, lower=True, trans="T")
