"""DDoS injection into traffic tensors and detection from the kept fibers of R."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ctd.dynamic import ctd_d_step, start_stream
from ctd.errors import ArgumentError, EmptyInputError, InvalidModeError, ShapeError
from ctd.static import LRFactors
from ctd.tensor import SparseTensor, column_sq_norms, matricize, time_slabs

#: attack fiber norm as a multiple of the mean nonzero background fiber norm
DEFAULT_NORM_RATIO = 50.0


@dataclass(frozen=True)
class AttackSpec:
    victim: int
    time: int
    sources: tuple[int, ...]
    intensity: float


@dataclass(frozen=True)
class DetectionReport:
    candidates: tuple[tuple[int, int], ...]
    representatives: int = 0
    recall: float = 0.0
    precision: float = 0.0
    f1: float = 0.0
    time_agreement: float = 0.0


def default_intensity(tensor: SparseTensor, n_sources: int, ratio: float = DEFAULT_NORM_RATIO) -> float:
    """Per-source weight making an attack fiber ``ratio`` times the mean background fiber norm."""
    sq = column_sq_norms(matricize(tensor, 0))
    sq = sq[sq > 0]
    mean_norm = float(np.sqrt(sq).mean()) if sq.size else 1.0
    return ratio * mean_norm / math.sqrt(n_sources)


def inject_ddos(
    tensor: SparseTensor,
    n: int,
    fraction: float = 0.2,
    intensity: Optional[float] = None,
    seed: Optional[int] = 0,
) -> tuple[SparseTensor, list[AttackSpec]]:
    """Add ``n`` attacks on distinct victims of a ``src x dst x time`` tensor.

    Each attack picks a victim destination and a time bin uniformly, then
    ``ceil(fraction * n_src)`` random sources each send ``intensity`` to it.
    """
    if tensor.ndim != 3:
        raise ShapeError("DDoS injection expects a src x dst x time tensor")
    n_src, n_dst, n_time = tensor.shape
    if int(n) < 1:
        raise ArgumentError(f"attack count must be >= 1, got {n}")
    if int(n) > n_dst:
        raise ArgumentError(f"{n} attacks need distinct victims but only {n_dst} hosts exist")
    if not 0 < fraction <= 1:
        raise ArgumentError(f"fraction must lie in (0, 1], got {fraction}")
    k = math.ceil(fraction * n_src - 1e-12)
    if intensity is None:
        intensity = default_intensity(tensor, k)
    if not intensity > 0:
        raise ArgumentError(f"intensity must be positive, got {intensity}")

    rng = np.random.default_rng(seed)
    victims = rng.choice(n_dst, size=int(n), replace=False)
    times = rng.integers(0, n_time, size=int(n))
    attacks, idx = [], []
    for victim, t in zip(victims, times):
        sources = np.sort(rng.choice(n_src, size=k, replace=False))
        attacks.append(AttackSpec(int(victim), int(t), tuple(int(s) for s in sources), float(intensity)))
        idx.append(np.column_stack([sources, np.full(k, victim), np.full(k, t)]))
    idx = np.vstack(idx)
    injected = SparseTensor(tensor.shape, idx, np.full(len(idx), float(intensity)))
    return tensor + injected, attacks


def detect_ddos(factors: LRFactors) -> DetectionReport:
    """Flag destinations whose first kept fiber has above-average norm.

    Kept fibers are grouped by destination (the non-time mode other than the
    decomposition mode); the earliest accepted fiber of each group is its
    representative.
    """
    if len(factors.shape) != 3:
        raise ShapeError("detection expects factors of a 3-mode tensor")
    if factors.mode == len(factors.shape) - 1:
        raise InvalidModeError("detection cannot run on the time mode")
    if factors.rank == 0:
        return DetectionReport(())
    norms = np.sqrt(column_sq_norms(factors.R))
    reps: dict[int, tuple[int, float]] = {}
    for i, fid in enumerate(factors.fiber_ids):
        dst, t = fid.coords
        if dst not in reps:
            reps[dst] = (t, float(norms[i]))
    mean = np.mean([nrm for _, nrm in reps.values()])
    candidates = tuple((dst, t) for dst, (t, nrm) in reps.items() if nrm > mean)
    return DetectionReport(candidates, representatives=len(reps))


def score_detection(report: DetectionReport, attacks: Sequence[AttackSpec]) -> DetectionReport:
    """Fill recall, precision and F1, matching flagged destinations against victims."""
    victims = {a.victim: a.time for a in attacks}
    flagged = {dst for dst, _ in report.candidates}
    hits = flagged & victims.keys()
    recall = len(hits) / len(victims) if victims else 0.0
    precision = len(hits) / len(flagged) if flagged else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    on_time = sum(1 for dst, t in report.candidates if victims.get(dst) == t)
    agreement = on_time / len(hits) if hits else 0.0
    return DetectionReport(
        report.candidates, report.representatives, recall, precision, f1, agreement
    )


@dataclass(frozen=True)
class DetectionConfig:
    n_attacks: int = 1
    fraction: float = 0.2
    d: int = 10
    epsilon: float = 0.15
    intensity: Optional[float] = None
    warmup: int = 1
    seed: int = 42


def run_online_detection(traffic: SparseTensor, attacks: Sequence[AttackSpec], config: DetectionConfig) -> DetectionReport:
    """Decompose the first ``warmup`` slabs statically, stream the rest, then detect.

    The warm-up is extended up to the first slab carrying any traffic.
    """
    slabs = time_slabs(traffic)
    busy = [t for t, slab in enumerate(slabs) if slab.nnz]
    if not busy:
        raise EmptyInputError("traffic tensor has no nonzeros")
    warmup = max(config.warmup, busy[0] + 1)
    state = start_stream(
        traffic.take_range(2, 0, warmup), 0, config.d, config.epsilon, config.seed
    )
    for slab in slabs[warmup:]:
        state = ctd_d_step(state, slab, config.d)
    return score_detection(detect_ddos(state.factors()), attacks)


@dataclass
class DetectionTrial:
    config: DetectionConfig
    attacks: list[AttackSpec] = field(default_factory=list)
    report: Optional[DetectionReport] = None


def detection_trial(background: SparseTensor, config: DetectionConfig) -> DetectionTrial:
    traffic, attacks = inject_ddos(
        background, config.n_attacks, config.fraction, config.intensity, config.seed
    )
    return DetectionTrial(config, attacks, run_online_detection(traffic, attacks, config))
