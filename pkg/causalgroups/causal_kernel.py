"""
Nonlinear causal kernel: cosine similarity of mapping matrices under the
Frobenius inner product, plus the set-level heterogeneity decision.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Union

import numpy as np

from causalgroups.causal_mapping import MappingMatrix, mapping_matrices
from causalgroups.distance_stats import as_sample_matrix
from causalgroups.errors import DimensionMismatch, FeatureCountMismatch, ZeroNorm

logger = logging.getLogger(__name__)

MatrixLike = Union[MappingMatrix, np.ndarray]


@dataclass
class KernelMatrix:
    """n x n Gram matrix of cosine similarities between mapping matrices"""
    data: np.ndarray
    nu: float


def _as_array(matrix: MatrixLike) -> np.ndarray:
    if isinstance(matrix, MappingMatrix):
        return matrix.data
    return np.asarray(matrix, dtype=np.float64)


def kappa(A: MatrixLike, B: MatrixLike) -> float:
    """<A, B>_F / (||A||_F ||B||_F)"""
    index_a = getattr(A, "sample_index", None)
    index_b = getattr(B, "sample_index", None)
    A = _as_array(A)
    B = _as_array(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"mapping matrices differ in shape: {A.shape} vs {B.shape}")

    norm_a = np.linalg.norm(A)
    norm_b = np.linalg.norm(B)
    if norm_a == 0.0:
        raise ZeroNorm(index_a)
    if norm_b == 0.0:
        raise ZeroNorm(index_b)

    value = float(np.sum(A * B) / (norm_a * norm_b))
    return min(1.0, max(-1.0, value))


def _unit_rows(matrices: Sequence[MatrixLike]) -> np.ndarray:
    flat = np.stack([_as_array(matrix).ravel() for matrix in matrices])
    norms = np.linalg.norm(flat, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNorm(int(zero[0]))
    return flat / norms[:, None]


def kernel_from_mappings(matrices: Sequence[MatrixLike], nu: float = float("nan")) -> KernelMatrix:
    """Cosine Gram matrix of precomputed mapping matrices"""
    if not matrices:
        raise DimensionMismatch("no mapping matrices given")

    unit = _unit_rows(matrices)
    K = unit @ unit.T
    K = 0.5 * (K + K.T)
    np.clip(K, -1.0, 1.0, out=K)
    np.fill_diagonal(K, 1.0)
    return KernelMatrix(data=K, nu=nu)


def kernel_matrix(S, nu: float) -> KernelMatrix:
    """K[i, i'] = kappa(Phi(S_i), Phi(S_i')), with every Phi built once"""
    S = as_sample_matrix(S)
    matrices = mapping_matrices(S, nu)
    kernel = kernel_from_mappings(matrices, nu=nu)
    logger.info(f"Built causal kernel for {S.shape[0]} samples, {S.shape[1]} features (nu={nu})")
    return kernel


def cross_kernel(S, S2, nu: float) -> np.ndarray:
    """
    n x n' block of kappa between the samples of two sets.

    Each set's mapping matrices are computed from that set alone.
    """
    S = as_sample_matrix(S)
    S2 = as_sample_matrix(S2)
    if S.shape[1] != S2.shape[1]:
        raise FeatureCountMismatch(f"feature counts differ: {S.shape[1]} vs {S2.shape[1]}")

    left = _unit_rows(mapping_matrices(S, nu))
    right = _unit_rows(mapping_matrices(S2, nu))
    return np.clip(left @ right.T, -1.0, 1.0)


def heterogeneity_decision(S, S2, nu: float) -> bool:
    """True when the summed cross-set kernel is strictly negative"""
    total = float(cross_kernel(S, S2, nu).sum())
    logger.debug(f"Cross-set kernel sum {total:.6g}")
    return total < 0.0


def kernel_gap(S, S2, nu: float) -> Dict[str, float]:
    """Within-set and cross-set mean kappa for two sample sets"""
    within_first = kernel_matrix(S, nu).data
    within_second = kernel_matrix(S2, nu).data
    cross = cross_kernel(S, S2, nu)
    return {
        "within_first": float(within_first.mean()),
        "within_second": float(within_second.mean()),
        "cross": float(cross.mean()),
    }
