"""Coordinate-format sparse tensors and the unfolding kernels built on them.

Indices are 0-based throughout the library. A mode-``alpha`` unfolding maps
entry ``(i_0, ..., i_{N-1})`` to row ``i_alpha`` and column
``sum_{k != alpha} i_k * J_k`` with ``J_k = prod_{m < k, m != alpha} I_m``,
i.e. the remaining indices raveled in Fortran order. With the time mode last,
appending a time slab therefore appends a contiguous block of columns.

Sparse matrices are plain :class:`scipy.sparse.csc_matrix` objects kept in
canonical form (sorted indices, no duplicates, no stored zeros).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import sparse

from ctd.errors import InvalidModeError, ShapeError

#: values below this magnitude produced by products are treated as zero
ZERO_TOL = 1e-14


def _check_mode(mode: int, ndim: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < ndim:
        raise InvalidModeError(f"mode {mode} out of range for a {ndim}-mode tensor")
    return int(mode)


def _other_shape(shape: Sequence[int], mode: int) -> tuple[int, ...]:
    return tuple(int(n) for k, n in enumerate(shape) if k != mode)


def unfolded_columns(shape: Sequence[int], mode: int) -> int:
    """Number of mode-``mode`` fibers, ``prod_{n != mode} I_n``."""
    return int(np.prod(_other_shape(shape, mode), dtype=np.int64))


class SparseTensor:
    """Immutable N-mode tensor in coordinate format.

    Entries are coalesced on construction: duplicate index-vectors are summed,
    exact zeros removed, and the result sorted lexicographically.
    """

    __slots__ = ("shape", "indices", "values")

    def __init__(self, shape, indices=None, values=None):
        shape = tuple(int(n) for n in shape)
        if not shape or any(n < 0 for n in shape):
            raise ShapeError(f"invalid shape {shape}")
        ndim = len(shape)
        if indices is None:
            indices = np.empty((0, ndim), dtype=np.int64)
            values = np.empty(0)
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, ndim)
        values = np.asarray(values, dtype=np.float64).ravel()
        if indices.shape[0] != values.shape[0]:
            raise ShapeError("indices and values differ in length")
        if indices.size and (
            (indices < 0).any() or (indices >= np.asarray(shape)).any()
        ):
            raise ShapeError(f"index out of bounds for shape {shape}")
        indices, values = _coalesce(indices, values)
        indices.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("SparseTensor is immutable")

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def __repr__(self):
        return f"SparseTensor(shape={self.shape}, nnz={self.nnz})"

    def __eq__(self, other):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @classmethod
    def from_dense(cls, array) -> SparseTensor:
        array = np.asarray(array, dtype=np.float64)
        idx = np.argwhere(array != 0)
        return cls(array.shape, idx, array[tuple(idx.T)])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        if self.nnz:
            np.add.at(out, tuple(self.indices.T), self.values)
        return out

    def norm(self) -> float:
        return frobenius_norm(self)

    def take_range(self, mode: int, start: int, stop: int) -> SparseTensor:
        """Sub-tensor with ``start <= i_mode < stop``, re-based to start at 0."""
        mode = _check_mode(mode, self.ndim)
        start, stop = max(0, int(start)), min(self.shape[mode], int(stop))
        if stop < start:
            stop = start
        keep = (self.indices[:, mode] >= start) & (self.indices[:, mode] < stop)
        idx = self.indices[keep].copy()
        idx[:, mode] -= start
        shape = list(self.shape)
        shape[mode] = stop - start
        return SparseTensor(shape, idx, self.values[keep])

    def __add__(self, other: SparseTensor) -> SparseTensor:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return SparseTensor(
            self.shape,
            np.vstack([self.indices, other.indices]),
            np.concatenate([self.values, other.values]),
        )


def _coalesce(indices: np.ndarray, values: np.ndarray):
    if values.size == 0:
        return indices.copy(), values.copy()
    order = np.lexsort(indices.T[::-1])
    indices, values = indices[order], values[order]
    if len(values) > 1:
        starts = np.concatenate(
            ([True], np.any(indices[1:] != indices[:-1], axis=1))
        )
        if not starts.all():
            pos = np.flatnonzero(starts)
            values = np.add.reduceat(values, pos)
            indices = indices[pos]
    keep = values != 0
    return np.ascontiguousarray(indices[keep]), np.ascontiguousarray(values[keep])


def concatenate(tensors: Sequence[SparseTensor], mode: int) -> SparseTensor:
    """Stack tensors along ``mode``; all other extents must agree."""
    first = tensors[0]
    mode = _check_mode(mode, first.ndim)
    offset, idx, vals = 0, [], []
    for t in tensors:
        if _other_shape(t.shape, mode) != _other_shape(first.shape, mode):
            raise ShapeError("cannot concatenate tensors with different extents")
        shifted = t.indices.copy()
        shifted[:, mode] += offset
        idx.append(shifted)
        vals.append(t.values)
        offset += t.shape[mode]
    shape = list(first.shape)
    shape[mode] = offset
    return SparseTensor(shape, np.vstack(idx), np.concatenate(vals))


def encode_column(shape: Sequence[int], mode: int, coords: Sequence[int]) -> int:
    """Column of the mode-``mode`` unfolding holding the fiber at ``coords``.

    ``coords`` lists the indices of every mode except ``mode``, in order.
    """
    other = _other_shape(shape, mode)
    if len(coords) != len(other):
        raise ShapeError(f"expected {len(other)} coordinates, got {len(coords)}")
    if not other:
        return 0
    return int(np.ravel_multi_index(tuple(int(c) for c in coords), other, order="F"))


def decode_column(shape: Sequence[int], mode: int, column: int) -> tuple[int, ...]:
    other = _other_shape(shape, mode)
    if not other:
        return ()
    return tuple(int(c) for c in np.unravel_index(int(column), other, order="F"))


def matricize(X: SparseTensor, mode: int) -> sparse.csc_matrix:
    """Mode-``mode`` unfolding of ``X`` as an ``I_mode x N_mode`` CSC matrix."""
    mode = _check_mode(mode, X.ndim)
    other = _other_shape(X.shape, mode)
    n_cols = unfolded_columns(X.shape, mode)
    rows = X.indices[:, mode]
    if other and X.nnz:
        rest = np.delete(X.indices, mode, axis=1)
        cols = np.ravel_multi_index(tuple(rest.T), other, order="F")
    else:
        cols = np.zeros(X.nnz, dtype=np.int64)
    M = sparse.csc_matrix((X.values, (rows, cols)), shape=(X.shape[mode], n_cols))
    M.sum_duplicates()
    return M


def fold(M, mode: int, shape: Sequence[int]) -> SparseTensor:
    """Inverse of :func:`matricize`."""
    shape = tuple(int(n) for n in shape)
    mode = _check_mode(mode, len(shape))
    expected = (shape[mode], unfolded_columns(shape, mode))
    if tuple(M.shape) != expected:
        raise ShapeError(f"matrix of shape {M.shape} cannot fold to {shape} (mode {mode})")
    C = sparse.coo_matrix(M)
    other = _other_shape(shape, mode)
    idx = np.empty((C.nnz, len(shape)), dtype=np.int64)
    idx[:, mode] = C.row
    if other:
        rest = np.unravel_index(C.col.astype(np.int64), other, order="F")
        for k, r in zip((k for k in range(len(shape)) if k != mode), rest):
            idx[:, k] = r
    return SparseTensor(shape, idx, C.data)


def prune(M, tol: float = ZERO_TOL) -> sparse.csc_matrix:
    """Canonical CSC copy of ``M`` with entries of magnitude ``<= tol`` dropped."""
    M = sparse.csc_matrix(M, copy=True)
    M.sum_duplicates()
    M.data[np.abs(M.data) <= tol] = 0.0
    M.eliminate_zeros()
    M.sort_indices()
    return M


def n_mode_product(X: SparseTensor, mode: int, U, transpose: bool = False) -> SparseTensor:
    """``X x_mode U`` (or ``U.T`` when ``transpose``), computed as ``U @ X_(mode)``."""
    mode = _check_mode(mode, X.ndim)
    U = sparse.csr_matrix(U.T if transpose else U)
    if U.shape[1] != X.shape[mode]:
        raise ShapeError(
            f"matrix with {U.shape[1]} columns cannot multiply mode {mode} of extent {X.shape[mode]}"
        )
    Y = prune(U @ matricize(X, mode))
    shape = list(X.shape)
    shape[mode] = U.shape[0]
    return fold(Y, mode, shape)


def frobenius_norm(X) -> float:
    if isinstance(X, SparseTensor):
        vals = X.values
    elif sparse.issparse(X):
        vals = X.data
    else:
        vals = np.asarray(X).ravel()
    return float(np.sqrt(np.dot(vals, vals)))


def column_sq_norms(M) -> np.ndarray:
    M = sparse.csc_matrix(M)
    return np.asarray(M.multiply(M).sum(axis=0), dtype=np.float64).ravel()


def time_slabs(X: SparseTensor) -> list[SparseTensor]:
    """Split ``X`` into its slabs along the last mode, each with extent 1 there."""
    t = X.indices[:, -1]
    order = np.argsort(t, kind="stable")
    bounds = np.searchsorted(t[order], np.arange(X.shape[-1] + 1))
    shape = X.shape[:-1] + (1,)
    slabs = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        sel = order[lo:hi]
        idx = X.indices[sel].copy()
        idx[:, -1] = 0
        slabs.append(SparseTensor(shape, idx, X.values[sel]))
    return slabs
