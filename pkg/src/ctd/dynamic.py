"""Incremental factor updates for tensors growing along their last (time) mode."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import sparse

from ctd.errors import ArgumentError, EmptyInputError, InvalidModeError, ShapeError
from ctd.sampling import (
    column_distribution,
    sample_with_replacement,
    unique_first_occurrence,
)
from ctd.static import (
    DEFAULT_EPSILON,
    FiberId,
    LRFactors,
    ctd_s,
    grow_basis,
    unfolded_core,
)
from ctd.tensor import SparseTensor, _check_mode, fold, frobenius_norm, matricize, prune


def default_step_samples(s: int) -> int:
    """Per-step sample size used alongside a static sample size ``s``."""
    return max(1, int(round(0.01 * s)))


@dataclass(frozen=True)
class StepInfo:
    t: int
    sampled: int
    accepted: int
    core_drift: Optional[float] = None


@dataclass(frozen=True, eq=False)
class StreamState:
    """Factors after ``t`` time slabs.

    ``basis`` is the dense copy of ``R`` used by the acceptance test;
    ``core_unfolded`` is the mode-``mode`` unfolding of the core, one column
    block per time slab. ``history`` holds the raw unfolded data only when the
    stream was started with ``keep_history=True``.
    """

    basis: np.ndarray
    U: np.ndarray
    R: sparse.csc_matrix
    core_unfolded: sparse.csc_matrix
    shape: tuple[int, ...]
    mode: int
    fiber_ids: tuple[FiberId, ...]
    epsilon: float
    seed: Optional[int]
    sampled_columns: tuple[int, ...] = ()
    history: Optional[sparse.csc_matrix] = None
    last_step: Optional[StepInfo] = None

    @property
    def t(self) -> int:
        return self.shape[-1]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def factors(self) -> LRFactors:
        core_shape = list(self.shape)
        core_shape[self.mode] = self.rank
        return LRFactors(
            core=fold(self.core_unfolded, self.mode, core_shape),
            U=self.U,
            R=self.R,
            mode=self.mode,
            fiber_ids=self.fiber_ids,
            epsilon=self.epsilon,
            seed=self.seed,
            sampled_columns=self.sampled_columns,
        )


def start_stream(
    X: SparseTensor,
    mode: int,
    s: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: Optional[int] = 42,
    keep_history: bool = False,
) -> StreamState:
    """Decompose the historical tensor ``X`` statically and wrap it as a stream state."""
    mode = _check_mode(mode, X.ndim)
    if mode == X.ndim - 1:
        raise InvalidModeError("the decomposition mode cannot be the time (last) mode")
    f = ctd_s(X, mode, s, epsilon, seed)
    M = matricize(X, mode)
    return StreamState(
        basis=f.R.toarray(),
        U=f.U,
        R=f.R,
        core_unfolded=unfolded_core(f.R, M),
        shape=X.shape,
        mode=mode,
        fiber_ids=f.fiber_ids,
        epsilon=f.epsilon,
        seed=seed,
        sampled_columns=f.sampled_columns,
        history=M if keep_history else None,
    )


def chain_product(dR, R, U, C):
    """``dR.T @ R @ U @ C`` evaluated strictly from the left.

    The leading factors shrink to a ``k x d`` dense matrix before touching the
    wide core, so the cost is linear in the width of ``C``.
    """
    if dR.shape[0] != R.shape[0] or R.shape[1] != U.shape[0] or U.shape[1] != C.shape[0]:
        raise ShapeError(
            f"non-conformable chain {dR.shape}^T {R.shape} {U.shape} {C.shape}"
        )
    left = dR.T @ R
    left = left.toarray() if sparse.issparse(left) else np.asarray(left)
    left = left @ np.asarray(U)
    if sparse.issparse(C):
        return sparse.csr_matrix(left) @ C
    return left @ np.asarray(C)


def _step_seed(seed, t):
    return None if seed is None else int(seed) ^ int(t)


def ctd_d_step(
    state: StreamState,
    dX: SparseTensor,
    d: int,
    epsilon: Optional[float] = None,
    seed: Optional[int] = None,
    exact_core: bool = False,
) -> StreamState:
    """Fold one time slab ``dX`` (time extent 1) into the factors.

    Fibers sampled from the slab extend the basis when independent; the core
    gains one column block, plus new rows when the basis grew. Unless
    ``exact_core`` is set, the new rows over past columns use the factored
    history ``R U C`` in place of the raw data. ``seed`` defaults to the
    stream seed; the step uses ``seed ^ t``.
    """
    if dX.ndim != len(state.shape) or dX.shape[:-1] != state.shape[:-1]:
        raise ShapeError(f"slab shape {dX.shape} does not match stream shape {state.shape}")
    if dX.shape[-1] != 1:
        raise ShapeError(f"slab must have time extent 1, got {dX.shape[-1]}")
    if int(d) < 1:
        raise ArgumentError(f"step sample size must be >= 1, got {d}")
    if exact_core and state.history is None:
        raise ArgumentError("exact_core requires a stream started with keep_history=True")
    epsilon = state.epsilon if epsilon is None else float(epsilon)
    seed = state.seed if seed is None else seed

    mode = state.mode
    dM = matricize(dX, mode)
    offset = state.core_unfolded.shape[1]
    try:
        sampled = sample_with_replacement(
            column_distribution(dM), int(d), _step_seed(seed, state.t)
        )
    except EmptyInputError:
        sampled = np.empty(0, dtype=np.int64)

    old_rank = state.rank
    basis, U, kept = grow_basis(dM, unique_first_occurrence(sampled), state.basis, state.U, epsilon)

    R_old = state.R
    C_old = state.core_unfolded
    top_right = unfolded_core(R_old, dM)
    history = None if state.history is None else sparse.hstack([state.history, dM], format="csc")
    if kept:
        dR = sparse.csc_matrix(basis[:, old_rank:])
        R = sparse.hstack([R_old, dR], format="csc")
        if exact_core:
            bottom_left = unfolded_core(dR, state.history)
        else:
            bottom_left = prune(chain_product(dR, R_old, state.U, C_old))
        core = sparse.bmat(
            [[C_old, top_right], [bottom_left, unfolded_core(dR, dM)]], format="csc"
        )
    else:
        R = R_old
        core = sparse.hstack([C_old, top_right], format="csc")

    drift = None
    if history is not None:
        reference = unfolded_core(R, history)
        denom = frobenius_norm(reference)
        diff = frobenius_norm(core - reference)
        drift = diff / denom if denom > 0 else diff

    shape = state.shape[:-1] + (state.t + 1,)
    new_ids = tuple(FiberId.decode(shape, mode, offset + j) for j in kept)
    return replace(
        state,
        basis=basis,
        U=U,
        R=R,
        core_unfolded=core,
        shape=shape,
        fiber_ids=state.fiber_ids + new_ids,
        sampled_columns=state.sampled_columns + tuple(offset + int(j) for j in sampled),
        history=history,
        last_step=StepInfo(state.t + 1, len(sampled), len(kept), drift),
    )
