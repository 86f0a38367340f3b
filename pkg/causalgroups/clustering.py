"""
Kernel k-means over a precomputed Gram matrix, the end-to-end subgroup
pipeline, and the raw-feature / polynomial / RBF baselines it is compared with.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics.pairwise import polynomial_kernel, rbf_kernel
from sklearn.preprocessing import StandardScaler

from config import settings
from causalgroups.causal_kernel import KernelMatrix, kernel_matrix
from causalgroups.distance_stats import as_sample_matrix
from causalgroups.errors import BadK, DimensionMismatch, EmptyInput

logger = logging.getLogger(__name__)


@dataclass
class ClusterAssignment:
    """Hard subgroup labels and the kernel k-means objective that produced them"""
    labels: np.ndarray
    k: int
    inertia: float
    iterations: int
    inertia_history: List[float] = field(default_factory=list)

    def get_stats(self) -> dict:
        sizes = np.bincount(self.labels, minlength=self.k)
        return {
            "k": self.k,
            "inertia": self.inertia,
            "iterations": self.iterations,
            "cluster_sizes": sizes.tolist(),
            "non_empty_clusters": int(np.count_nonzero(sizes)),
        }


def _as_gram(K_mat: Union[KernelMatrix, np.ndarray]) -> np.ndarray:
    K = K_mat.data if isinstance(K_mat, KernelMatrix) else np.asarray(K_mat, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DimensionMismatch(f"kernel must be square, got shape {K.shape}")
    return K


def canonical_order(K: np.ndarray, decimals: int = 10) -> np.ndarray:
    """
    Point order that depends only on kernel values, not on row positions.

    Points are sorted lexicographically by their sorted (rounded) kernel rows,
    so relabeling the samples relabels the order by the same permutation.
    """
    rows = np.round(np.sort(K, axis=1), decimals)
    return np.lexsort(rows.T[::-1])


def _seed_centers(K: np.ndarray, k: int, rng: np.random.Generator) -> List[int]:
    """k-means++ seeding with kernel-induced squared distances, drawn in canonical point order"""
    n = K.shape[0]
    diag = np.diag(K)
    order = canonical_order(K)
    centers = [int(order[rng.integers(n)])]
    closest = np.maximum(diag + diag[centers[0]] - 2.0 * K[:, centers[0]], 0.0)

    while len(centers) < k:
        closest[centers] = 0.0
        weights = closest[order]
        total = weights.sum()
        if total > 0.0:
            candidate = int(order[rng.choice(n, p=weights / total)])
        else:
            # every remaining point coincides with a center: take the first free point
            candidate = int(next(i for i in order if i not in centers))
        centers.append(candidate)
        distance = np.maximum(diag + diag[candidate] - 2.0 * K[:, candidate], 0.0)
        closest = np.minimum(closest, distance)

    return centers


def _centroid_distances(K: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """
    Squared feature-space distance of every point to every cluster centroid:

        K[i, i] - 2/|c| sum_{j in c} K[i, j] + 1/|c|^2 sum_{j, j' in c} K[j, j']

    Columns of empty clusters are +inf.
    """
    n = K.shape[0]
    diag = np.diag(K)
    distances = np.full((n, k), np.inf)
    for c in range(k):
        members = np.flatnonzero(labels == c)
        if members.size == 0:
            continue
        size = members.size
        cross = K[:, members].sum(axis=1) / size
        within = K[np.ix_(members, members)].sum() / (size * size)
        distances[:, c] = np.maximum(diag - 2.0 * cross + within, 0.0)
    return distances


def _objective(K: np.ndarray, labels: np.ndarray, k: int) -> float:
    distances = _centroid_distances(K, labels, k)
    return float(distances[np.arange(labels.size), labels].sum())


def _repair_empty(K: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Re-seed each empty cluster with the point farthest from its own centroid"""
    labels = labels.copy()
    for c in range(k):
        if np.any(labels == c):
            continue
        distances = _centroid_distances(K, labels, k)
        own = distances[np.arange(labels.size), labels]
        sizes = np.bincount(labels, minlength=k)
        # never empty another cluster while repairing this one
        own[sizes[labels] <= 1] = -np.inf
        farthest = int(np.argmax(own))
        logger.warning(f"Cluster {c} emptied; re-seeding with point {farthest}")
        labels[farthest] = c
    return labels


def kernel_kmeans(
    K_mat: Union[KernelMatrix, np.ndarray],
    k: int,
    seed: Optional[int] = None,
    max_iter: Optional[int] = None,
) -> ClusterAssignment:
    """
    Lloyd-style kernel k-means with k-means++ seeding.

    Args:
        K_mat: n x n symmetric kernel (KernelMatrix or array)
        k: number of clusters, 2 <= k <= n
        seed: seed for the initial centers
        max_iter: maximum number of Lloyd iterations

    Returns:
        ClusterAssignment with the recorded objective after every iteration
    """
    K = _as_gram(K_mat)
    n = K.shape[0]
    seed = settings.seed if seed is None else seed
    max_iter = settings.max_iter if max_iter is None else max_iter
    if n == 0:
        raise EmptyInput("kernel matrix has no rows")
    if not 2 <= k <= n:
        raise BadK(f"k must satisfy 2 <= k <= n = {n}, got {k}")
    if max_iter < 1:
        raise BadK(f"max_iter must be >= 1, got {max_iter}")

    rng = np.random.default_rng(seed)
    centers = _seed_centers(K, k, rng)
    diag = np.diag(K)
    to_centers = diag[:, None] + diag[centers][None, :] - 2.0 * K[:, centers]
    labels = np.argmin(to_centers, axis=1)
    labels[centers] = np.arange(k)
    labels = _repair_empty(K, labels, k)

    history = [_objective(K, labels, k)]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        distances = _centroid_distances(K, labels, k)
        new_labels = _repair_empty(K, np.argmin(distances, axis=1), k)
        # ties keep the lowest cluster index; stop once assignments settle
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        history.append(_objective(K, labels, k))
        logger.debug(f"kernel k-means iteration {iterations}: inertia {history[-1]:.6g}")

    logger.info(f"kernel k-means finished after {iterations} iterations, inertia {history[-1]:.6g}")
    return ClusterAssignment(
        labels=labels.astype(np.int64),
        k=k,
        inertia=history[-1],
        iterations=iterations,
        inertia_history=history,
    )


def cluster_pipeline(
    S,
    k: int,
    nu: Optional[float] = None,
    seed: Optional[int] = None,
    max_iter: Optional[int] = None,
) -> ClusterAssignment:
    """Samples -> mapping matrices -> causal kernel -> kernel k-means"""
    nu = settings.nu if nu is None else nu
    kernel = kernel_matrix(S, nu)
    return kernel_kmeans(kernel, k, seed=seed, max_iter=max_iter)


def baseline_kernel(S, kind: str, degree: int = 3) -> np.ndarray:
    """
    Polynomial or RBF Gram matrix on standardized features, rescaled to unit
    diagonal so it is comparable with the causal kernel.
    """
    S = StandardScaler().fit_transform(as_sample_matrix(S))
    if kind == "poly":
        K = polynomial_kernel(S, degree=degree)
    elif kind == "rbf":
        K = rbf_kernel(S)
    else:
        raise ValueError(f"unknown baseline kernel {kind!r}; expected 'poly' or 'rbf'")
    scale = np.sqrt(np.diag(K))
    return K / np.outer(scale, scale)


def raw_kmeans(S, k: int, seed: Optional[int] = None) -> np.ndarray:
    """Plain k-means on standardized features"""
    seed = settings.seed if seed is None else seed
    S = StandardScaler().fit_transform(as_sample_matrix(S))
    model = KMeans(n_clusters=k, n_init=10, random_state=seed)
    return model.fit_predict(S).astype(np.int64)
