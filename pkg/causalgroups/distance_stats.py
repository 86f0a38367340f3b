"""
Distance tensors, u-centering and unbiased (marginal) distance covariance.

A SampleMatrix is a plain ``numpy`` array of shape (n, m): rows are samples,
columns are features. A DistanceTensor stacks the per-feature pairwise
absolute-difference matrices along the last axis, shape (n, n, m).
"""
import logging

import dcor
import numpy as np

from causalgroups.errors import (
    DegenerateFeature,
    DimensionMismatch,
    DimensionTooSmall,
    IndexOutOfRange,
    NonFiniteInput,
)

logger = logging.getLogger(__name__)

MIN_SAMPLES = 4
MIN_FEATURES = 2


def as_sample_matrix(S, min_samples: int = MIN_SAMPLES, min_features: int = MIN_FEATURES) -> np.ndarray:
    """Validate and return ``S`` as a float64 (n, m) array"""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2:
        raise DimensionMismatch(f"sample matrix must be 2-D, got shape {S.shape}")
    n, m = S.shape
    if n < min_samples:
        raise DimensionTooSmall(f"need at least {min_samples} samples, got {n}")
    if m < min_features:
        raise DimensionTooSmall(f"need at least {min_features} features, got {m}")
    if not np.all(np.isfinite(S)):
        raise NonFiniteInput("sample matrix contains NaN or infinite values")
    return S


def _check_feature_index(S: np.ndarray, index: int) -> int:
    m = S.shape[1]
    if not 0 <= index < m:
        raise IndexOutOfRange(f"feature index {index} outside [0, {m})")
    return int(index)


def pairwise_distance_tensor(S) -> np.ndarray:
    """H[i, i', j] = |S[i, j] - S[i', j]|"""
    S = as_sample_matrix(S)
    return np.abs(S[:, None, :] - S[None, :, :])


def u_center(M) -> np.ndarray:
    """
    U-center a distance matrix (or a stack of them along the last axis).

    Each (d, d) slice goes through ``dcor.u_centered``, which applies the
    four-term formula

        m~_st = m_st - rowsum_t/(d-2) - colsum_s/(d-2) + total/((d-1)(d-2))

    and zeroes the diagonal.

    Args:
        M: (d, d) matrix or (d, d, k) stack, symmetric with zero diagonal

    Returns:
        Array of the same shape as ``M``
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim not in (2, 3) or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix or stack, got shape {M.shape}")
    d = M.shape[0]
    if d < 3:
        raise DimensionTooSmall(f"u-centering needs d >= 3, got {d}")

    if M.ndim == 2:
        return dcor.u_centered(M)
    return np.stack([dcor.u_centered(M[:, :, j]) for j in range(M.shape[2])], axis=-1)


def ucentered_inner(A, B) -> float:
    """
    Unbiased inner product of two u-centered matrices.

    The off-diagonal sum of A * B divided by d(d-3); inputs with a nonzero
    diagonal have it dropped before ``dcor.u_product``.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"shapes differ or are not square: {A.shape} vs {B.shape}")
    d = A.shape[0]
    if d < 4:
        raise DimensionTooSmall(f"unbiased inner product needs d >= 4, got {d}")

    if np.any(np.diag(A)):
        A = A.copy()
        np.fill_diagonal(A, 0.0)
    return float(dcor.u_product(A, B))


def _distance_matrix(x: np.ndarray) -> np.ndarray:
    return np.abs(x[:, None] - x[None, :])


def dcov_u(x, y) -> float:
    """Unbiased squared distance covariance of two samples"""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionMismatch(f"length mismatch: {x.size} vs {y.size}")
    if x.size < MIN_SAMPLES:
        raise DimensionTooSmall(f"dcov_u needs n >= {MIN_SAMPLES}, got {x.size}")
    return float(dcor.u_distance_covariance_sqr(x, y, method="naive"))


def _marginal_ucentered(column: np.ndarray) -> np.ndarray:
    """Sum over alpha of the u-centered distance matrices of H[:, alpha, j]"""
    H_j = _distance_matrix(column)
    n = H_j.shape[0]
    summed = np.zeros((n, n))
    for alpha in range(n):
        summed += u_center(_distance_matrix(H_j[:, alpha]))
    return summed


def mdcov(S, p: int, q: int) -> float:
    """
    Marginal distance covariance between features ``p`` and ``q``.

    Equals sum_alpha sum_beta dCov^2(P_alpha, Q_beta) over the columns of the
    per-feature distance matrices, evaluated through bilinearity as a single
    inner product of the summed u-centered matrices.
    """
    S = as_sample_matrix(S)
    p = _check_feature_index(S, p)
    q = _check_feature_index(S, q)

    A = _marginal_ucentered(S[:, p])
    B = A if q == p else _marginal_ucentered(S[:, q])
    return ucentered_inner(A, B)


def mdcor(S, p: int, q: int) -> float:
    """Marginal distance correlation: mdcov(p, q) / sqrt(mdcov(p, p) mdcov(q, q))"""
    S = as_sample_matrix(S)
    p = _check_feature_index(S, p)
    q = _check_feature_index(S, q)

    A = _marginal_ucentered(S[:, p])
    B = _marginal_ucentered(S[:, q])
    var_p = ucentered_inner(A, A)
    var_q = ucentered_inner(B, B)
    for feature, value in ((p, var_p), (q, var_q)):
        if value <= 0.0:
            raise DegenerateFeature(feature, f"mdcov of feature {feature} with itself is {value:.3g} <= 0")

    return ucentered_inner(A, B) / np.sqrt(var_p * var_q)
