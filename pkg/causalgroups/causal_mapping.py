"""
Sample mapping function and the aggregate dependence decision.

For a sample matrix S (n x m) every sample i is mapped to an m x m matrix

    Phi(S_i) = sum_zeta W_zeta W_zeta^T - Gamma(nu),
    W_zeta   = sum_gamma |Z[zeta, gamma, :] - Z[i, gamma, :]|,

where Z is the u-centered distance tensor normalized per feature by its mean
distance, and Gamma(nu) carries n times the chi-square(1) critical value off the
diagonal. A positive aggregate entry sum_i Phi(S_i)[p, q] marks p and q as
dependent.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
from scipy.special import ndtri

from config import settings
from causalgroups.distance_stats import MIN_FEATURES, MIN_SAMPLES, as_sample_matrix, u_center
from causalgroups.errors import DegenerateFeature, IndexOutOfRange, OutOfDomain

logger = logging.getLogger(__name__)


@dataclass
class MappingMatrix:
    """Phi(S_i) for one sample"""
    data: np.ndarray
    sample_index: int
    nu: float


@dataclass
class ThresholdMatrix:
    """Gamma(nu): n * chi2_{1-nu}(1) off the diagonal, zero on it"""
    data: np.ndarray
    nu: float


class Dependence(str, Enum):
    DEPENDENT = "Dependent"
    INDEPENDENT = "Independent"


def _check_nu(nu: float) -> float:
    if not 0.0 < nu < 1.0:
        raise OutOfDomain(f"significance level must lie in (0, 1), got {nu}")
    return float(nu)


def chi_square_quantile_1df(prob: float) -> float:
    """
    Quantile of the chi-square distribution with one degree of freedom.

    Uses chi2_1 = Z^2, so the ``prob`` quantile is the squared standard-normal
    quantile at (1 + prob) / 2.
    """
    if not 0.0 < prob < 1.0:
        raise OutOfDomain(f"probability must lie in (0, 1), got {prob}")
    z = ndtri((1.0 + prob) / 2.0)
    return float(z * z)


def gamma_matrix(nu: float, n: int, m: int) -> ThresholdMatrix:
    nu = _check_nu(nu)
    if n < MIN_SAMPLES:
        raise OutOfDomain(f"gamma matrix needs n >= {MIN_SAMPLES}, got {n}")
    if m < MIN_FEATURES:
        raise OutOfDomain(f"gamma matrix needs m >= {MIN_FEATURES}, got {m}")

    data = np.full((m, m), n * chi_square_quantile_1df(1.0 - nu))
    np.fill_diagonal(data, 0.0)
    return ThresholdMatrix(data=data, nu=nu)


def normalized_ucentered_tensor(S) -> np.ndarray:
    """
    Z tensor: u-centered per-feature distance matrices divided by the mean of
    the raw distance matrix (diagonal included in the mean).

    Returns:
        (n, n, m) array
    """
    S = as_sample_matrix(S)
    H = np.abs(S[:, None, :] - S[None, :, :])
    means = H.mean(axis=(0, 1))
    for j, mean in enumerate(means):
        if mean == 0.0:
            raise DegenerateFeature(j)
    return u_center(H) / means


def _first_term(Z: np.ndarray, i: int) -> np.ndarray:
    # W[zeta] = sum over gamma of |Z[zeta, gamma, :] - Z[i, gamma, :]|
    W = np.abs(Z - Z[i][None, :, :]).sum(axis=1)
    return W.T @ W


def _check_sample_index(n: int, i: int) -> int:
    if not 0 <= i < n:
        raise IndexOutOfRange(f"sample index {i} outside [0, {n})")
    return int(i)


def phi(S, i: int, nu: float) -> MappingMatrix:
    """Mapping matrix of sample ``i`` via the factorized outer-product sum"""
    S = as_sample_matrix(S)
    n, m = S.shape
    i = _check_sample_index(n, i)
    gamma = gamma_matrix(nu, n, m)

    Z = normalized_ucentered_tensor(S)
    return MappingMatrix(data=_first_term(Z, i) - gamma.data, sample_index=i, nu=gamma.nu)


def phi_naive(S, i: int, nu: float) -> MappingMatrix:
    """
    Mapping matrix of sample ``i`` by the literal triple sum over
    (alpha, beta, zeta). O(n^3 m^2); intended as a reference for small n.
    """
    S = as_sample_matrix(S)
    n, m = S.shape
    i = _check_sample_index(n, i)
    gamma = gamma_matrix(nu, n, m)
    Z = normalized_ucentered_tensor(S)

    total = np.zeros((m, m))
    for alpha in range(n):
        for beta in range(n):
            for zeta in range(n):
                v_alpha = np.abs(Z[zeta, alpha, :] - Z[i, alpha, :])
                v_beta = np.abs(Z[zeta, beta, :] - Z[i, beta, :])
                total += np.outer(v_alpha, v_beta)

    return MappingMatrix(data=total - gamma.data, sample_index=i, nu=gamma.nu)


def mapping_matrices(S, nu: float, num_threads: Optional[int] = None) -> List[MappingMatrix]:
    """
    Mapping matrices for every sample, sharing one Z tensor.

    Per-sample work is spread over ``num_threads`` worker threads; results are
    returned in sample order.
    """
    S = as_sample_matrix(S)
    n, m = S.shape
    gamma = gamma_matrix(nu, n, m)
    Z = normalized_ucentered_tensor(S)
    num_threads = num_threads or settings.num_threads

    def build(i: int) -> MappingMatrix:
        return MappingMatrix(data=_first_term(Z, i) - gamma.data, sample_index=i, nu=gamma.nu)

    if num_threads > 1:
        with ThreadPoolExecutor(max_workers=num_threads) as executor:
            matrices = list(executor.map(build, range(n)))
    else:
        matrices = [build(i) for i in range(n)]

    logger.debug(f"Built {n} mapping matrices (m={m}, nu={gamma.nu}, threads={num_threads})")
    return matrices


def aggregate_phi(S, nu: float) -> np.ndarray:
    """sum_i Phi(S_i), accumulated in sample order"""
    matrices = mapping_matrices(S, nu)
    total = np.zeros_like(matrices[0].data)
    for matrix in matrices:
        total += matrix.data
    return total


def dependence_decision(S, p: int, q: int, nu: float, aggregate: Optional[np.ndarray] = None) -> Dependence:
    """
    Dependent iff the aggregate mapping entry (p, q) is strictly positive.

    A precomputed ``aggregate_phi(S, nu)`` may be passed to decide many pairs.
    """
    S = as_sample_matrix(S)
    m = S.shape[1]
    for index in (p, q):
        if not 0 <= index < m:
            raise IndexOutOfRange(f"feature index {index} outside [0, {m})")
    if p == q:
        raise IndexOutOfRange(f"dependence decision needs two distinct features, got p = q = {p}")

    if aggregate is None:
        aggregate = aggregate_phi(S, nu)
    value = aggregate[p, q]
    return Dependence.DEPENDENT if value > 0.0 else Dependence.INDEPENDENT
