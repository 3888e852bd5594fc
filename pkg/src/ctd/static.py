"""Static decomposition ``X ~ C x_mode (R U)`` with R made of actual fibers of X."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import sparse

from ctd.errors import ArgumentError, EmptyInputError, ShapeError
from ctd.sampling import (
    column_distribution,
    sample_with_replacement,
    unique_first_occurrence,
)
from ctd.tensor import (
    SparseTensor,
    _check_mode,
    decode_column,
    fold,
    matricize,
    n_mode_product,
    prune,
)

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class FiberId:
    """Flat unfolding column of a kept fiber and its per-mode coordinates."""

    column: int
    coords: tuple[int, ...]

    @classmethod
    def decode(cls, shape, mode, column) -> FiberId:
        return cls(int(column), decode_column(shape, mode, column))


@dataclass(frozen=True, eq=False)
class LRFactors:
    """Factors of ``X ~ core x_mode (R @ U)``.

    ``R`` is ``I_mode x k`` (CSC), ``U`` is a dense symmetric ``k x k``
    approximation of ``inv(R.T @ R)`` and ``core`` has extent ``k`` at ``mode``.
    ``fiber_ids[i]`` locates column ``i`` of ``R`` in the decomposed tensor.
    """

    core: SparseTensor
    U: np.ndarray
    R: sparse.csc_matrix
    mode: int
    fiber_ids: tuple[FiberId, ...]
    epsilon: float
    seed: Optional[int] = None
    sampled_columns: tuple[int, ...] = field(default=())

    @property
    def rank(self) -> int:
        return self.R.shape[1]

    @property
    def shape(self) -> tuple[int, ...]:
        """Shape of the tensor these factors approximate."""
        shape = list(self.core.shape)
        shape[self.mode] = self.R.shape[0]
        return tuple(shape)

    def __eq__(self, other):
        if not isinstance(other, LRFactors):
            return NotImplemented
        return (
            self.core == other.core
            and self.U.shape == other.U.shape
            and np.array_equal(self.U, other.U)
            and self.R.shape == other.R.shape
            and np.array_equal(self.R.toarray(), other.R.toarray())
            and self.mode == other.mode
            and self.fiber_ids == other.fiber_ids
            and self.epsilon == other.epsilon
            and self.seed == other.seed
            and self.sampled_columns == other.sampled_columns
        )

    __hash__ = None


class Append(NamedTuple):
    accepted: bool
    R: np.ndarray
    U: np.ndarray
    delta: float = 0.0
    y: Optional[np.ndarray] = None
    degenerate: bool = False


def try_append_fiber(R: np.ndarray, U: np.ndarray, x: np.ndarray, epsilon: float) -> Append:
    """Append ``x`` to ``R`` if it is not within ``epsilon`` of span(R).

    ``R`` is a dense ``I x k`` basis (``k`` may be 0) and ``U = inv(R.T R)``.
    On acceptance ``U`` is grown by the bordered-inverse update so that the
    invariant is kept without refactoring.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if R.shape[0] != x.shape[0]:
        raise ShapeError(f"fiber of length {x.shape[0]} does not match {R.shape[0]} rows")
    k = R.shape[1]
    y = U @ (R.T @ x)
    res = x - R @ y
    res_norm = float(np.linalg.norm(res))
    if res_norm <= epsilon * float(np.linalg.norm(x)):
        return Append(False, R, U)
    delta = res_norm * res_norm
    if not delta > 0:
        return Append(False, R, U, degenerate=True)
    new_U = np.empty((k + 1, k + 1))
    new_U[:k, :k] = U + np.outer(y, y) / delta
    new_U[:k, k] = -y / delta
    new_U[k, :k] = -y / delta
    new_U[k, k] = 1.0 / delta
    return Append(True, np.column_stack([R, x]), new_U, delta, y)


def column_of(M: sparse.csc_matrix, j: int) -> np.ndarray:
    x = np.zeros(M.shape[0])
    lo, hi = M.indptr[j], M.indptr[j + 1]
    x[M.indices[lo:hi]] = M.data[lo:hi]
    return x


def grow_basis(M: sparse.csc_matrix, columns, R: np.ndarray, U: np.ndarray, epsilon: float):
    """Run the acceptance test over ``columns`` of ``M`` in order.

    Returns the grown ``(R, U)`` and the list of accepted column indices.
    """
    kept = []
    for j in columns:
        step = try_append_fiber(R, U, column_of(M, int(j)), epsilon)
        if step.accepted:
            R, U = step.R, step.U
            kept.append(int(j))
    return R, U, kept


def compute_core(X: SparseTensor, R, mode: int) -> SparseTensor:
    """``X x_mode R.T``."""
    mode = _check_mode(mode, X.ndim)
    if R.shape[0] != X.shape[mode]:
        raise ShapeError(f"R has {R.shape[0]} rows, mode {mode} has extent {X.shape[mode]}")
    return n_mode_product(X, mode, R, transpose=True)


def unfolded_core(R, M) -> sparse.csc_matrix:
    """``R.T @ M`` with numerical zeros dropped."""
    return prune(sparse.csr_matrix(R).T @ M)


def ctd_s(
    X: SparseTensor,
    mode: int,
    s: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: Optional[int] = 42,
) -> LRFactors:
    """Decompose ``X`` along ``mode`` from ``s`` norm-biased fiber samples."""
    mode = _check_mode(mode, X.ndim)
    if int(s) < 1:
        raise ArgumentError(f"sample size must be >= 1, got {s}")
    if not epsilon > 0:
        raise ArgumentError(f"epsilon must be positive, got {epsilon}")
    if X.nnz == 0:
        raise EmptyInputError("cannot decompose an all-zero tensor")

    M = matricize(X, mode)
    sampled = sample_with_replacement(column_distribution(M), int(s), seed)
    R, U, kept = grow_basis(
        M, unique_first_occurrence(sampled), np.zeros((M.shape[0], 0)), np.zeros((0, 0)), epsilon
    )
    R = sparse.csc_matrix(R)
    core_shape = list(X.shape)
    core_shape[mode] = R.shape[1]
    return LRFactors(
        core=fold(unfolded_core(R, M), mode, core_shape),
        U=U,
        R=R,
        mode=mode,
        fiber_ids=tuple(FiberId.decode(X.shape, mode, j) for j in kept),
        epsilon=float(epsilon),
        seed=seed,
        sampled_columns=tuple(int(j) for j in sampled),
    )
