from dataclasses import replace

import numpy as np
import pytest

from causalgroups.causal_kernel import (
    KernelMatrix,
    cross_kernel,
    heterogeneity_decision,
    kappa,
    kernel_from_mappings,
    kernel_gap,
    kernel_matrix,
)
from causalgroups.causal_mapping import MappingMatrix, mapping_matrices
from causalgroups.errors import DimensionMismatch, FeatureCountMismatch, ZeroNorm
from causalgroups.synth import GenConfig, chain_dag, generate_group, two_dag_benchmark


def test_kappa_cosine_properties(rng):
    A = rng.normal(size=(3, 3))
    assert kappa(A, A) == pytest.approx(1.0, abs=1e-12)
    assert kappa(A, -A) == pytest.approx(-1.0, abs=1e-12)
    assert kappa(A, 4.2 * A) == pytest.approx(1.0, abs=1e-12)
    assert -1.0 <= kappa(A, rng.normal(size=(3, 3))) <= 1.0


def test_kappa_errors(rng):
    A = rng.normal(size=(3, 3))
    with pytest.raises(DimensionMismatch):
        kappa(A, np.ones((2, 2)))

    zero = MappingMatrix(data=np.zeros((3, 3)), sample_index=5, nu=0.05)
    with pytest.raises(ZeroNorm) as info:
        kappa(A, zero)
    assert info.value.sample_index == 5


def test_kernel_matrix_validity():
    rng = np.random.default_rng(11)
    S = rng.normal(size=(30, 4))
    K = kernel_matrix(S, 0.05)

    assert isinstance(K, KernelMatrix)
    assert K.nu == 0.05
    np.testing.assert_allclose(K.data, K.data.T, atol=1e-12)
    np.testing.assert_allclose(np.diag(K.data), 1.0, atol=1e-12)
    assert K.data.min() >= -1.0 and K.data.max() <= 1.0
    assert np.linalg.eigvalsh(K.data).min() >= -1e-8


def test_kernel_matrix_matches_pairwise_kappa(small_samples):
    matrices = mapping_matrices(small_samples, 0.05)
    K = kernel_matrix(small_samples, 0.05).data
    for i in range(6):
        for j in range(6):
            assert K[i, j] == pytest.approx(kappa(matrices[i], matrices[j]), abs=1e-12)


def test_kernel_from_mappings_rejects_zero_and_empty(rng):
    with pytest.raises(DimensionMismatch):
        kernel_from_mappings([])
    with pytest.raises(ZeroNorm) as info:
        kernel_from_mappings([rng.normal(size=(2, 2)), np.zeros((2, 2))])
    assert info.value.sample_index == 1


def test_cross_kernel_shape_and_feature_check(rng):
    S = rng.normal(size=(8, 3))
    S2 = rng.normal(size=(5, 3))
    block = cross_kernel(S, S2, 0.05)
    assert block.shape == (8, 5)
    assert np.all(np.abs(block) <= 1.0)

    with pytest.raises(FeatureCountMismatch):
        cross_kernel(S, rng.normal(size=(5, 4)), 0.05)


@pytest.mark.parametrize("seed", range(5))
def test_heterogeneity_decision_same_set(seed):
    S = np.random.default_rng(seed).normal(size=(12, 3))
    assert heterogeneity_decision(S, S, 0.05) is False


def test_kernel_gap_keys(rng):
    S = rng.normal(size=(8, 3))
    gap = kernel_gap(S, S + 0.0, 0.05)
    assert set(gap) == {"within_first", "within_second", "cross"}
    assert gap["within_first"] == pytest.approx(gap["within_second"], abs=1e-12)
    assert gap["cross"] == pytest.approx(gap["within_first"], abs=1e-12)


def test_kernel_invariant_to_scaled_mappings(small_samples):
    matrices = [matrix.data for matrix in mapping_matrices(small_samples, 0.05)]
    scaled = [matrix * factor for matrix, factor in zip(matrices, [0.5, 3.0, 1.0, 7.5, 0.01, 2.0])]
    np.testing.assert_allclose(kernel_from_mappings(scaled).data, kernel_from_mappings(matrices).data, atol=1e-12)


def test_kernel_follows_sample_relabeling(rng):
    S = rng.normal(size=(10, 3))
    order = rng.permutation(10)
    K = kernel_matrix(S, 0.05).data
    np.testing.assert_allclose(kernel_matrix(S[order], 0.05).data, K[np.ix_(order, order)], atol=1e-10)


def test_chain_against_empty_heterogeneity_matches_gap():
    for seed in range(3):
        config = GenConfig(n=30, m=4, weight_low=1.0, weight_high=2.0, seed=seed)
        S, truth = two_dag_benchmark(config)
        chain, empty = S[truth == 0], S[truth == 1]

        gap = kernel_gap(chain, empty, 0.05)
        assert all(-1.0 <= value <= 1.0 for value in gap.values())
        assert gap["cross"] == pytest.approx(cross_kernel(chain, empty, 0.05).mean(), abs=1e-12)
        assert heterogeneity_decision(chain, empty, 0.05) is (gap["cross"] < 0.0)


@pytest.mark.parametrize("seed", range(10))
def test_same_graph_draws_are_not_heterogeneous(seed):
    config = GenConfig(n=30, m=4, weight_low=1.0, weight_high=2.0, seed=seed)
    graph = chain_dag(4, seed)
    first = generate_group(config, graph)
    second = generate_group(replace(config, seed=seed + 100), graph)
    assert heterogeneity_decision(first, second, 0.05) is False
