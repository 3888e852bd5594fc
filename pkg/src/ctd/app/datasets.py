"""Synthetic tensors: exact low-rank streams and traffic-like stand-ins.

The traffic generators reproduce the shape and nonzero count of the public
datasets the method is usually run on. They are not copies of that data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ctd.tensor import SparseTensor, unfolded_columns


def low_rank_tensor(
    shape: Sequence[int],
    rank: int,
    mode: int = 0,
    density: float = 0.05,
    seed: Optional[int] = 0,
    onset: Optional[Sequence[int]] = None,
) -> SparseTensor:
    """Tensor whose mode-``mode`` fibers span exactly ``rank`` directions.

    A ``density`` fraction of fibers is nonzero; each is a random combination
    of all directions. ``onset[k]`` delays direction ``k`` to time indices
    (last mode) ``>= onset[k]``; direction 0 should start at 0.
    """
    rng = np.random.default_rng(seed)
    shape = tuple(int(n) for n in shape)
    other = tuple(n for k, n in enumerate(shape) if k != mode)
    n_cols = unfolded_columns(shape, mode)
    directions = rng.standard_normal((shape[mode], rank))
    n_active = max(rank, int(round(density * n_cols)))
    cols = np.sort(rng.choice(n_cols, size=min(n_active, n_cols), replace=False))
    weights = rng.standard_normal((rank, len(cols)))
    coords = np.unravel_index(cols, other, order="F")
    if onset is not None:
        time = coords[-1] if mode != len(shape) - 1 else None
        for k, start in enumerate(onset):
            if time is not None:
                weights[k, time < start] = 0.0
    fibers = directions @ weights
    rows, which = np.nonzero(fibers)
    idx = np.empty((len(rows), len(shape)), dtype=np.int64)
    idx[:, mode] = rows
    for k, c in zip((k for k in range(len(shape)) if k != mode), coords):
        idx[:, k] = c[which]
    return SparseTensor(shape, idx, fibers[rows, which])


def _zipf_weights(n: int, exponent: float, rng) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** exponent
    return rng.permutation(w / w.sum())


def _distinct_cells(shape, nnz, marginals, rng):
    """Draw ``nnz`` distinct cells with probability proportional to the product of marginals."""
    chosen: set = set()
    cells = []
    while len(cells) < nnz:
        batch = 2 * (nnz - len(cells)) + 16
        draw = np.column_stack([rng.choice(n, size=batch, p=p) for n, p in zip(shape, marginals)])
        for row in map(tuple, draw):
            if row not in chosen:
                chosen.add(row)
                cells.append(row)
                if len(cells) == nnz:
                    break
    return np.asarray(cells, dtype=np.int64)


@dataclass(frozen=True)
class ContactConfig:
    """Sparse contact network: distinct ``(src, dst, time)`` cells drawn with
    probability proportional to Zipf source activity times Zipf destination
    popularity. Cell values are ``1 + Poisson(mean_extra)``.
    """

    n_src: int = 77
    n_dst: int = 274
    n_time: int = 1567
    nnz: int = 27972
    src_exponent: float = 0.9
    dst_exponent: float = 0.9
    mean_extra: float = 0.5


def contact_network(config: ContactConfig = ContactConfig(), seed: Optional[int] = 0) -> SparseTensor:
    """Contact tensor with exactly ``config.nnz`` nonzeros."""
    rng = np.random.default_rng(seed)
    shape = (config.n_src, config.n_dst, config.n_time)
    marginals = [
        _zipf_weights(config.n_src, config.src_exponent, rng),
        _zipf_weights(config.n_dst, config.dst_exponent, rng),
        np.full(config.n_time, 1.0 / config.n_time),
    ]
    cells = _distinct_cells(shape, config.nnz, marginals, rng)
    values = 1.0 + rng.poisson(config.mean_extra, size=len(cells))
    return SparseTensor(shape, cells, values)


def haggle_like(seed: Optional[int] = 0) -> SparseTensor:
    """Stand-in with the Haggle contact tensor's shape (77 x 274 x 1567) and 27,972 nonzeros."""
    return contact_network(ContactConfig(), seed)


@dataclass(frozen=True)
class TrafficConfig:
    """Background traffic for a ``src x dst x time`` tensor (CAIDA-sized by default).

    Sources form ``n_communities`` disjoint client groups of
    ``community_size`` hosts, each with a fixed Zipf traffic mix. Every
    destination is served by one community. In each time bin a Poisson number
    of destinations (Zipf popularity) is active; an active destination
    receives ``volume * mix`` packets from its community, with a heavy-tailed
    (lognormal) volume and a small multiplicative jitter per cell.
    """

    n_src: int = 189
    n_dst: int = 189
    n_time: int = 1000
    n_communities: int = 4
    community_size: int = 12
    mix_exponent: float = 1.0
    dst_exponent: float = 1.0
    active_per_bin: float = 1.67
    volume_median: float = 200.0
    volume_sigma: float = 1.0
    jitter: float = 0.05


CAIDA_LIKE = TrafficConfig()


def synthetic_traffic(config: TrafficConfig = CAIDA_LIKE, seed: Optional[int] = 0) -> SparseTensor:
    rng = np.random.default_rng(seed)
    c = config
    hosts = rng.permutation(c.n_src)[: c.n_communities * c.community_size]
    groups = hosts.reshape(c.n_communities, c.community_size)
    mix = 1.0 / np.arange(1, c.community_size + 1) ** c.mix_exponent
    mixes = [rng.permutation(mix / mix.sum()) for _ in range(c.n_communities)]
    serves = rng.integers(0, c.n_communities, size=c.n_dst)
    popularity = _zipf_weights(c.n_dst, c.dst_exponent, rng)

    idx, vals = [], []
    for t in range(c.n_time):
        n_active = min(c.n_dst, max(1 if t == 0 else 0, rng.poisson(c.active_per_bin)))
        if n_active == 0:
            continue
        for dst in rng.choice(c.n_dst, size=n_active, replace=False, p=popularity):
            g = serves[dst]
            volume = c.volume_median * rng.lognormal(0.0, c.volume_sigma)
            counts = np.rint(volume * mixes[g] * rng.lognormal(0.0, c.jitter, size=c.community_size))
            keep = counts > 0
            src = groups[g][keep]
            idx.append(np.column_stack([src, np.full(len(src), dst), np.full(len(src), t)]))
            vals.append(counts[keep])
    return SparseTensor((c.n_src, c.n_dst, c.n_time), np.vstack(idx), np.concatenate(vals))
