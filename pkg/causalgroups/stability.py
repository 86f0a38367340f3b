"""
Subgroup-wise linear regression, cross-subgroup coefficient stability and the
held-out-subgroup error of models restricted to the most stable features.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from sklearn.linear_model import LinearRegression, Ridge

from config import settings
from causalgroups.clustering import ClusterAssignment
from causalgroups.distance_stats import as_sample_matrix
from causalgroups.errors import (
    AllSubgroupsTooSmall,
    DimensionMismatch,
    NonFiniteInput,
    TooFewSubgroups,
)
from causalgroups.eval_metrics import rmse

logger = logging.getLogger(__name__)


@dataclass
class SubgroupCoefficients:
    """One row (intercept, slope_1, ..., slope_m) per fitted subgroup"""
    beta: np.ndarray
    groups: List[int]
    skipped: List[int] = field(default_factory=list)
    ridge_groups: List[int] = field(default_factory=list)


@dataclass
class StabilityRanking:
    variances: np.ndarray
    order: np.ndarray           # feature indices, most stable first

    def top(self, k: int) -> np.ndarray:
        return self.order[:k]


def _inputs(S, y, labels):
    S = as_sample_matrix(S, min_samples=1, min_features=1)
    y = np.asarray(y, dtype=np.float64).ravel()
    labels = labels.labels if isinstance(labels, ClusterAssignment) else np.asarray(labels).ravel()
    if y.size != S.shape[0] or labels.size != S.shape[0]:
        raise DimensionMismatch(f"{S.shape[0]} samples, {y.size} targets, {labels.size} labels")
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput("target contains non-finite values")
    return S, y, labels


def _fit(X: np.ndarray, y: np.ndarray, ridge_alpha: float):
    """Least squares with intercept; ridge when the design is rank deficient"""
    design = np.column_stack([np.ones(X.shape[0]), X])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        return Ridge(alpha=ridge_alpha).fit(X, y), True
    return LinearRegression().fit(X, y), False


def subgroup_regression(S, y, labels, ridge_alpha: Optional[float] = None) -> SubgroupCoefficients:
    """
    Fit y ~ intercept + S within every subgroup.

    Subgroups with at most m + 1 samples are skipped with a warning.
    """
    S, y, labels = _inputs(S, y, labels)
    ridge_alpha = settings.ridge_alpha if ridge_alpha is None else ridge_alpha
    m = S.shape[1]

    rows, groups, skipped, ridge_groups = [], [], [], []
    for group in np.unique(labels):
        members = labels == group
        size = int(members.sum())
        if size <= m + 1:
            logger.warning(f"Skipping subgroup {group}: {size} samples for {m} features")
            skipped.append(int(group))
            continue
        model, used_ridge = _fit(S[members], y[members], ridge_alpha)
        if used_ridge:
            logger.warning(f"Subgroup {group} design is rank deficient; using ridge alpha={ridge_alpha}")
            ridge_groups.append(int(group))
        rows.append(np.concatenate([[model.intercept_], model.coef_]))
        groups.append(int(group))

    if not rows:
        raise AllSubgroupsTooSmall(f"no subgroup has more than {m + 1} samples")
    return SubgroupCoefficients(beta=np.vstack(rows), groups=groups, skipped=skipped, ridge_groups=ridge_groups)


def feature_vectors(coeffs: SubgroupCoefficients) -> np.ndarray:
    """m x K matrix whose row p holds feature p's slope in every subgroup"""
    if coeffs.beta.shape[0] < 2:
        raise TooFewSubgroups(f"need at least 2 fitted subgroups, got {coeffs.beta.shape[0]}")
    return coeffs.beta[:, 1:].T.copy()


def stability_ranking(F) -> StabilityRanking:
    """Sample variance (ddof=1) of each feature vector; ascending, ties by feature index"""
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2 or F.shape[1] < 2:
        raise TooFewSubgroups(f"feature vectors need at least 2 subgroup entries, got shape {F.shape}")
    variances = np.var(F, axis=1, ddof=1)
    return StabilityRanking(variances=variances, order=np.argsort(variances, kind="stable"))


def rank_features(S, y, labels, ridge_alpha: Optional[float] = None) -> StabilityRanking:
    return stability_ranking(feature_vectors(subgroup_regression(S, y, labels, ridge_alpha)))


def sta_error_eval(S, y, labels, top_k: Optional[int] = None) -> Dict:
    """
    Round-robin subgroup holdout.

    For every subgroup: rank features on the remaining subgroups, fit pooled
    least squares on their top_k most stable features, and score train RMSE
    and held-out RMSE. Both are averaged over folds.
    """
    S, y, labels = _inputs(S, y, labels)
    top_k = settings.top_k if top_k is None else top_k
    m = S.shape[1]
    if not 1 <= top_k <= m:
        raise ValueError(f"top_k must satisfy 1 <= top_k <= m = {m}, got {top_k}")

    groups = np.unique(labels)
    if groups.size < 3:
        raise TooFewSubgroups(f"need at least 3 subgroups for holdout evaluation, got {groups.size}")

    folds = []
    for held_out in groups:
        train = labels != held_out
        ranking = rank_features(S[train], y[train], labels[train])
        features = np.sort(ranking.top(top_k))
        model, _ = _fit(S[train][:, features], y[train], settings.ridge_alpha)
        folds.append(
            {
                "held_out": int(held_out),
                "features": features.tolist(),
                "rmse_train": rmse(y[train], model.predict(S[train][:, features])),
                "sta_error": rmse(y[~train], model.predict(S[~train][:, features])),
            }
        )
        logger.debug(f"Holdout subgroup {held_out}: features {features.tolist()}, sta_error {folds[-1]['sta_error']:.6g}")

    return {
        "rmse_train": float(np.mean([fold["rmse_train"] for fold in folds])),
        "sta_error": float(np.mean([fold["sta_error"] for fold in folds])),
        "top_k": top_k,
        "folds": folds,
    }
