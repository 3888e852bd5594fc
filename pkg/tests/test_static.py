import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse

from conftest import random_sparse
from ctd.app.datasets import low_rank_tensor
from ctd.errors import ArgumentError, EmptyInputError, InvalidModeError, ShapeError
from ctd.evaluation import oracle_projection_error, reconstruction_error, relative_error
from ctd.sampling import column_distribution, sample_with_replacement, unique_first_occurrence
from ctd.static import FiberId, compute_core, ctd_s, try_append_fiber
from ctd.tensor import SparseTensor, fold, matricize


def basis_from(R):
    return R, np.linalg.inv(R.T @ R)


def test_append_rejects_existing_column(rng):
    R, U = basis_from(rng.standard_normal((6, 2)))
    out = try_append_fiber(R, U, R[:, 1].copy(), 1e-6)
    assert not out.accepted
    assert out.R is R and out.U is U


def test_append_orthogonal_fiber():
    R = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
    R, U = basis_from(R)
    x = np.array([0.0, 0.0, 3.0])
    out = try_append_fiber(R, U, x, 1e-6)
    assert out.accepted
    assert out.delta == 9.0
    np.testing.assert_array_equal(out.y, [0.0, 0.0])
    np.testing.assert_array_equal(out.R[:, 2], x)


def test_append_zero_fiber_rejected():
    R, U = np.zeros((4, 0)), np.zeros((0, 0))
    assert not try_append_fiber(R, U, np.zeros(4), 1e-6).accepted


def test_append_first_fiber_initialises_U():
    x = np.array([1.0, 2.0, 2.0])
    out = try_append_fiber(np.zeros((3, 0)), np.zeros((0, 0)), x, 1e-6)
    assert out.accepted
    np.testing.assert_array_equal(out.U, [[1 / 9]])


def test_append_matches_dense_inverse(rng):
    R, U = basis_from(rng.standard_normal((10, 3)))
    out = try_append_fiber(R, U, rng.standard_normal(10), 1e-6)
    assert out.accepted
    expected = np.linalg.inv(out.R.T @ out.R)
    np.testing.assert_allclose(out.U, expected, rtol=1e-8, atol=1e-8 * np.abs(expected).max())
    np.testing.assert_allclose(out.U, out.U.T, rtol=0, atol=1e-10)


def test_append_shape_mismatch(rng):
    R, U = basis_from(rng.standard_normal((5, 2)))
    with pytest.raises(ShapeError):
        try_append_fiber(R, U, np.ones(4), 1e-6)


def rank_one(shape, rng):
    a, b, c = (rng.standard_normal(n) for n in shape)
    return SparseTensor.from_dense(np.einsum("i,j,k->ijk", a, b, c))


@pytest.mark.parametrize("s", [1, 5, 40])
def test_rank_one_tensor_keeps_one_fiber(rng, s):
    X = rank_one((4, 5, 6), rng)
    f = ctd_s(X, 0, s, seed=3)
    assert f.rank == 1
    assert relative_error(X, f) <= 1e-12


def test_two_orthogonal_directions():
    D = np.zeros((4, 6, 5))
    u, v = np.array([1.0, 1.0, 0.0, 0.0]), np.array([0.0, 0.0, 2.0, -1.0])
    rng = np.random.default_rng(9)
    for j in range(6):
        for k in range(5):
            D[:, j, k] = (u if (j + k) % 2 else v) * rng.uniform(0.5, 2.0)
    X = SparseTensor.from_dense(D)
    f = ctd_s(X, 0, 50, seed=1)
    assert f.rank == 2
    R0 = sparse.csc_matrix(np.column_stack([u, v]))
    assert oracle_projection_error(X, 0, R0) <= 1e-12
    assert reconstruction_error(X, f) <= 1e-12


def sampled_fibers(X, mode, f):
    return matricize(X, mode)[:, list(f.sampled_columns)]


def test_error_equals_projection_oracle_30_40_50(rng):
    X = random_sparse((30, 40, 50), 0.03, rng)
    f = ctd_s(X, 0, 100, epsilon=1e-6, seed=5)
    # the draws recorded in the factors are exactly the sampler's output
    M = matricize(X, 0)
    np.testing.assert_array_equal(
        f.sampled_columns, sample_with_replacement(column_distribution(M), 100, 5)
    )
    oracle = oracle_projection_error(X, 0, sampled_fibers(X, 0, f))
    err = reconstruction_error(X, f)
    assert err == pytest.approx(oracle, rel=1e-8, abs=1e-10 * X.norm())


def test_factor_invariants(rng):
    X = random_sparse((12, 9, 8), 0.1, rng)
    f = ctd_s(X, 1, 30, seed=2)
    M = matricize(X, 1)
    R = f.R.toarray()
    first = unique_first_occurrence(f.sampled_columns)[0]
    assert f.fiber_ids[0].column == first
    assert {fid.column for fid in f.fiber_ids} <= set(f.sampled_columns)
    for i, fid in enumerate(f.fiber_ids):
        np.testing.assert_array_equal(R[:, i], M[:, [fid.column]].toarray().ravel())
        assert fid == FiberId.decode(X.shape, 1, fid.column)
        j, k = fid.coords
        np.testing.assert_array_equal(R[:, i], X.to_dense()[j, :, k])
    assert np.array_equal(f.U, f.U.T)
    np.testing.assert_allclose((R.T @ R) @ f.U, np.eye(f.rank), atol=1e-8)
    np.testing.assert_allclose(
        matricize(f.core, 1).toarray(), R.T @ M.toarray(), rtol=1e-12, atol=1e-12
    )
    assert f.core.shape == (12, f.rank, 8)


@given(st.integers(0, 10_000), st.integers(1, 30), st.integers(0, 30))
@settings(max_examples=25, deadline=None)
def test_error_non_increasing_in_prefix_samples(seed, s1, extra):
    X = random_sparse((8, 6, 7), 0.15, np.random.default_rng(seed))
    if X.nnz == 0:
        return
    e1 = reconstruction_error(X, ctd_s(X, 0, s1, seed=seed))
    e2 = reconstruction_error(X, ctd_s(X, 0, s1 + extra, seed=seed))
    assert e2 <= e1 * (1 + 1e-9) + 1e-12 * X.norm()


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_rank_bound_on_low_rank_tensor(rank):
    for seed in range(5):
        X = low_rank_tensor((15, 10, 12), rank, mode=0, density=0.2, seed=seed)
        f = ctd_s(X, 0, 200, epsilon=1e-6, seed=seed)
        assert f.rank <= rank


def test_compute_core_examples(rng):
    X = random_sparse((4, 3, 5), 0.5, rng)
    e = np.zeros((4, 1))
    e[2, 0] = 1.0
    C = compute_core(X, sparse.csc_matrix(e), 0)
    np.testing.assert_array_equal(C.to_dense()[0], X.to_dense()[2])
    C0 = compute_core(X, sparse.csc_matrix((4, 0)), 0)
    assert C0.shape == (0, 3, 5) and C0.nnz == 0
    R = rng.standard_normal((4, 2))
    np.testing.assert_allclose(
        compute_core(X, R, 0).to_dense(), np.einsum("ia,ijk->ajk", R, X.to_dense()), atol=1e-13
    )
    with pytest.raises(ShapeError):
        compute_core(X, np.ones((3, 1)), 0)


def test_ctd_s_errors(rng):
    X = random_sparse((4, 3, 5), 0.5, rng)
    with pytest.raises(EmptyInputError):
        ctd_s(SparseTensor((3, 3, 3)), 0, 5)
    with pytest.raises(InvalidModeError):
        ctd_s(X, 3, 5)
    with pytest.raises(ArgumentError):
        ctd_s(X, 0, 0)
    with pytest.raises(ArgumentError):
        ctd_s(X, 0, 5, epsilon=0.0)


def test_ctd_s_deterministic(rng):
    X = random_sparse((10, 10, 10), 0.05, rng)
    assert ctd_s(X, 2, 20, seed=8) == ctd_s(X, 2, 20, seed=8)
