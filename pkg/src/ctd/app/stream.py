"""Streaming harness: static start on a historical prefix, then one update per slab."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ctd.dynamic import StreamState, ctd_d_step, default_step_samples, start_stream
from ctd.errors import ArgumentError, ShapeError
from ctd.evaluation import EvalReport, memory_usage, relative_error
from ctd.static import DEFAULT_EPSILON, LRFactors
from ctd.tensor import SparseTensor, time_slabs


@dataclass(frozen=True)
class StreamConfig:
    mode: int = 0
    s: int = 1000
    d: Optional[int] = None
    epsilon: float = DEFAULT_EPSILON
    seed: int = 42
    split: float = 0.8
    evaluate: bool = True
    keep_history: bool = False
    exact_core: bool = False

    @property
    def step_samples(self) -> int:
        return default_step_samples(self.s) if self.d is None else int(self.d)


@dataclass
class StreamResult:
    historical_steps: int
    reports: list[EvalReport] = field(default_factory=list)
    drifts: list[Optional[float]] = field(default_factory=list)
    final: Optional[StreamState] = None

    @property
    def factors(self) -> LRFactors:
        return self.final.factors()

    def mean(self, attr: str) -> float:
        return float(np.mean([getattr(r, attr) for r in self.reports])) if self.reports else float("nan")


def split_point(n_time: int, split: float) -> int:
    if not 0 < split < 1:
        raise ArgumentError(f"split must lie in (0, 1), got {split}")
    n_hist = math.floor(split * n_time + 1e-9)
    return min(max(n_hist, 1), n_time - 1)


def run_stream(tensor: SparseTensor, config: StreamConfig = StreamConfig()) -> StreamResult:
    """Decompose the first ``split`` of the time mode statically, stream the rest.

    One :class:`EvalReport` is produced per dynamic step; its error is measured
    against the prefix seen so far and its time covers the update only.
    """
    n_time = tensor.shape[-1]
    if n_time < 5:
        raise ShapeError(f"streaming needs a time extent of at least 5, got {n_time}")
    n_hist = split_point(n_time, config.split)
    slabs = time_slabs(tensor)
    state = start_stream(
        tensor.take_range(tensor.ndim - 1, 0, n_hist),
        config.mode,
        config.s,
        config.epsilon,
        config.seed,
        keep_history=config.keep_history or config.exact_core,
    )
    result = StreamResult(n_hist)
    d = config.step_samples
    for t in range(n_hist, n_time):
        start = time.perf_counter()
        state = ctd_d_step(state, slabs[t], d, exact_core=config.exact_core)
        elapsed = time.perf_counter() - start
        if config.evaluate:
            prefix = tensor.take_range(tensor.ndim - 1, 0, t + 1)
            factors = state.factors()
            err = relative_error(prefix, factors)
            mem = memory_usage(prefix, factors) if prefix.nnz else float("nan")
        else:
            err = mem = float("nan")
        result.reports.append(EvalReport(err, mem, elapsed, state.rank, step=t - n_hist + 1))
        result.drifts.append(state.last_step.core_drift)
    result.final = state
    return result
