"""Reconstruction metrics and the dense projection oracle used to check them."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse

from ctd.errors import EmptyInputError, OracleTooLargeError, ShapeError, UndefinedMetricError
from ctd.static import LRFactors
from ctd.tensor import SparseTensor, fold, frobenius_norm, matricize, prune

ORACLE_CELL_BUDGET = 10**6
ORACLE_RCOND = 1e-10


@dataclass(frozen=True)
class EvalReport:
    relative_error: float
    memory_usage: float
    wall_time_seconds: float
    kept_fibers: int
    step: int = 0

    HEADER = "step\terror\tseconds\tmemory_usage\tkept_fibers"

    def to_record(self) -> str:
        return (
            f"{self.step}\t{self.relative_error:.17g}\t{self.wall_time_seconds:.17g}"
            f"\t{self.memory_usage:.17g}\t{self.kept_fibers}"
        )

    @classmethod
    def from_record(cls, line: str) -> EvalReport:
        step, err, secs, mem, kept = line.rstrip("\n").split("\t")
        return cls(float(err), float(mem), float(secs), int(kept), int(step))


def oracle_projection_error(X: SparseTensor, mode: int, R0, max_cells: int = ORACLE_CELL_BUDGET) -> float:
    """``||X_(mode) - R0 pinv(R0) X_(mode)||_F`` by dense SVD.

    Only the nonzero columns of the unfolding are densified; zero columns
    contribute nothing to the residual.
    """
    M = matricize(X, mode)
    if R0.shape[0] != M.shape[0]:
        raise ShapeError(f"R0 has {R0.shape[0]} rows, unfolding has {M.shape[0]}")
    if R0.shape[1] == 0:
        raise EmptyInputError("oracle needs at least one sampled fiber")
    nz_cols = np.flatnonzero(np.diff(M.indptr))
    cells = M.shape[0] * (len(nz_cols) + R0.shape[1])
    if cells > max_cells:
        raise OracleTooLargeError(f"oracle would densify {cells} cells (budget {max_cells})")
    A = M[:, nz_cols].toarray()
    B = R0.toarray() if sparse.issparse(R0) else np.asarray(R0, dtype=np.float64)
    Q, sv, _ = np.linalg.svd(B, full_matrices=False)
    if sv.size == 0 or sv[0] == 0:
        return float(np.linalg.norm(A))
    Q = Q[:, sv > ORACLE_RCOND * sv[0]]
    return float(np.linalg.norm(A - Q @ (Q.T @ A)))


def _approx_unfolded(factors: LRFactors) -> sparse.csc_matrix:
    Cm = matricize(factors.core, factors.mode)
    return sparse.csc_matrix(factors.R @ (sparse.csr_matrix(factors.U) @ Cm))


def _check_shapes(X: SparseTensor, factors: LRFactors):
    if X.shape != factors.shape:
        raise ShapeError(f"tensor shape {X.shape} does not match factors {factors.shape}")


def reconstruction_error(X: SparseTensor, factors: LRFactors) -> float:
    """Unsquared ``||X - C x_mode (R U)||_F``."""
    _check_shapes(X, factors)
    return frobenius_norm(_approx_unfolded(factors) - matricize(X, factors.mode))


def relative_error(X: SparseTensor, factors: LRFactors) -> float:
    """Squared reconstruction error over ``||X||_F^2``."""
    norm = frobenius_norm(X)
    if norm == 0:
        raise UndefinedMetricError("relative error is undefined for a zero tensor")
    return reconstruction_error(X, factors) ** 2 / norm**2


def memory_usage(X: SparseTensor, factors: LRFactors) -> float:
    """``(nnz(C) + nnz(U) + nnz(R)) / nnz(X)``."""
    if X.nnz == 0:
        raise EmptyInputError("memory usage is undefined for an empty tensor")
    stored = factors.core.nnz + int(np.count_nonzero(factors.U)) + int(factors.R.count_nonzero())
    return float(Fraction(stored, X.nnz))


def reconstruct(factors: LRFactors) -> SparseTensor:
    return fold(prune(_approx_unfolded(factors)), factors.mode, factors.shape)
