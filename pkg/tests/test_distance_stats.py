import numpy as np
import pytest

from causalgroups.distance_stats import (
    as_sample_matrix,
    dcov_u,
    mdcor,
    mdcov,
    pairwise_distance_tensor,
    u_center,
    ucentered_inner,
)
from causalgroups.errors import (
    DegenerateFeature,
    DimensionMismatch,
    DimensionTooSmall,
    IndexOutOfRange,
    NonFiniteInput,
)


def _scalar_u_center(M):
    d = M.shape[0]
    out = np.zeros_like(M)
    total = M.sum()
    for s in range(d):
        for t in range(d):
            if s != t:
                out[s, t] = (
                    M[s, t]
                    - M[:, t].sum() / (d - 2)
                    - M[s, :].sum() / (d - 2)
                    + total / ((d - 1) * (d - 2))
                )
    return out


def _scalar_dcov(x, y):
    A = _scalar_u_center(np.abs(x[:, None] - x[None, :]))
    B = _scalar_u_center(np.abs(y[:, None] - y[None, :]))
    n = x.size
    return sum(A[s, t] * B[s, t] for s in range(n) for t in range(n) if s != t) / (n * (n - 3))


def test_as_sample_matrix_validation():
    with pytest.raises(DimensionTooSmall):
        as_sample_matrix(np.zeros((3, 2)))
    with pytest.raises(DimensionTooSmall):
        as_sample_matrix(np.zeros((5, 1)))
    with pytest.raises(DimensionMismatch):
        as_sample_matrix(np.zeros(5))
    bad = np.ones((4, 2))
    bad[2, 1] = np.nan
    with pytest.raises(NonFiniteInput):
        as_sample_matrix(bad)


def test_pairwise_distance_tensor_values():
    S = np.array([[1.0, 0.0], [2.0, 0.0], [4.0, 0.0], [7.0, 0.0]])
    H = pairwise_distance_tensor(S)

    assert H.shape == (4, 4, 2)
    np.testing.assert_array_equal(H[:3, :3, 0], [[0, 1, 3], [1, 0, 2], [3, 2, 0]])
    np.testing.assert_array_equal(H[:, :, 1], np.zeros((4, 4)))
    assert np.all(H[np.arange(4), np.arange(4), :] == 0.0)


def test_u_center_zero_matrix():
    np.testing.assert_array_equal(u_center(np.zeros((5, 5))), np.zeros((5, 5)))


@pytest.mark.parametrize("d", range(3, 11))
def test_u_center_constant_off_diagonal_any_dimension(d):
    M = np.full((d, d), 1.75)
    np.fill_diagonal(M, 0.0)
    np.testing.assert_allclose(u_center(M), np.zeros((d, d)), atol=1e-12)


def test_u_center_matches_scalar_formula_on_random_stack(rng):
    S = rng.normal(size=(7, 2))
    H = np.abs(S[:, None, :] - S[None, :, :])
    stacked = u_center(H)
    for j in range(2):
        np.testing.assert_allclose(stacked[:, :, j], _scalar_u_center(H[:, :, j]), atol=1e-12)


def test_u_center_matches_scalar_formula():
    x = np.array([1.0, 2.0, 4.0])
    M = np.abs(x[:, None] - x[None, :])
    np.testing.assert_allclose(u_center(M), _scalar_u_center(M), atol=1e-12)


def test_u_center_rows_sum_to_zero(rng):
    x = rng.normal(size=8)
    centered = u_center(np.abs(x[:, None] - x[None, :]))
    np.testing.assert_allclose(centered.sum(axis=0), 0.0, atol=1e-10)
    np.testing.assert_allclose(centered.sum(axis=1), 0.0, atol=1e-10)


def test_u_center_stack_matches_slices(rng):
    S = rng.normal(size=(6, 3))
    H = np.abs(S[:, None, :] - S[None, :, :])
    stacked = u_center(H)
    for j in range(3):
        np.testing.assert_allclose(stacked[:, :, j], u_center(H[:, :, j]), atol=1e-12)


def test_u_center_rejects_small_or_non_square():
    with pytest.raises(DimensionTooSmall):
        u_center(np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        u_center(np.zeros((3, 4)))


def test_ucentered_inner_basics(rng):
    x = rng.normal(size=7)
    A = u_center(np.abs(x[:, None] - x[None, :]))
    assert ucentered_inner(np.zeros((7, 7)), A) == 0.0
    assert ucentered_inner(A, A) >= 0.0
    with pytest.raises(DimensionTooSmall):
        ucentered_inner(np.zeros((3, 3)), np.zeros((3, 3)))


def test_ucentered_inner_is_bilinear(rng):
    A, B, C = (u_center(np.abs(v[:, None] - v[None, :])) for v in rng.normal(size=(3, 9)))
    a, b = 1.7, -0.4
    combined = ucentered_inner(a * A + b * B, C)
    assert combined == pytest.approx(a * ucentered_inner(A, C) + b * ucentered_inner(B, C), abs=1e-10)
    assert ucentered_inner(A, C) == pytest.approx(ucentered_inner(C, A), abs=1e-12)


def test_ucentered_inner_ignores_diagonal(rng):
    x = rng.normal(size=6)
    A = u_center(np.abs(x[:, None] - x[None, :]))
    shifted = A + np.eye(6)
    assert ucentered_inner(shifted, A) == pytest.approx(ucentered_inner(A, A), abs=1e-12)


def test_dcov_u_matches_scalar_oracle(rng):
    x = rng.normal(size=9)
    y = x**2 + 0.2 * rng.normal(size=9)
    assert dcov_u(x, y) == pytest.approx(_scalar_dcov(x, y), abs=1e-10)
    assert dcov_u(x, x) == pytest.approx(_scalar_dcov(x, x), abs=1e-10)


def test_dcov_u_hand_value():
    # u-centered entries are -2/3 and 1/3; off-diagonal square sum 8/3 over d(d-3) = 4
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert dcov_u(x, x) == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_dcov_u_constant_is_zero(rng):
    assert dcov_u(np.ones(6), rng.normal(size=6)) == pytest.approx(0.0, abs=1e-12)


def test_dcov_u_length_checks():
    with pytest.raises(DimensionMismatch):
        dcov_u(np.arange(5.0), np.arange(6.0))
    with pytest.raises(DimensionTooSmall):
        dcov_u(np.arange(3.0), np.arange(3.0))


def test_dcov_u_unbiased_for_independent_pairs():
    rng = np.random.default_rng(7)
    values = np.array([dcov_u(rng.normal(size=10), rng.normal(size=10)) for _ in range(2000)])
    stderr = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean()) <= 3.0 * stderr


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_mdcov_matches_naive_double_sum(n):
    rng = np.random.default_rng(n)
    S = rng.normal(size=(n, 2))
    P = np.abs(S[:, None, 0] - S[None, :, 0])
    Q = np.abs(S[:, None, 1] - S[None, :, 1])
    naive = sum(dcov_u(P[:, a], Q[:, b]) for a in range(n) for b in range(n))

    assert mdcov(S, 0, 1) == pytest.approx(naive, rel=1e-9, abs=1e-12)


def test_mdcov_symmetry_and_constant_column(rng):
    S = rng.normal(size=(6, 3))
    assert mdcov(S, 0, 2) == pytest.approx(mdcov(S, 2, 0), rel=1e-12)

    S[:, 1] = 3.0
    assert mdcov(S, 1, 0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(IndexOutOfRange):
        mdcov(S, 0, 3)


def test_mdcor_self_and_symmetry(rng):
    S = rng.normal(size=(8, 3))
    assert mdcor(S, 1, 1) == pytest.approx(1.0, abs=1e-12)
    assert mdcor(S, 0, 2) == pytest.approx(mdcor(S, 2, 0), rel=1e-12)


def test_mdcor_degenerate_feature(rng):
    S = rng.normal(size=(6, 2))
    S[:, 0] = 1.0
    with pytest.raises(DegenerateFeature) as info:
        mdcor(S, 0, 1)
    assert info.value.feature == 0


def test_mdcor_coupled_pair_exceeds_independent_pair():
    wins = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=20)
        coupled = np.column_stack([x, 2.0 * x])
        independent = np.column_stack([x, rng.normal(size=20)])
        wins += mdcor(coupled, 0, 1) > mdcor(independent, 0, 1)
    assert wins == 10
