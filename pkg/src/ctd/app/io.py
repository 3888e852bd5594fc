"""Edge-list ingestion (KONECT-style) and traffic tensor construction."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

import numpy as np

from ctd.errors import ArgumentError, EmptyInputError, ParseError
from ctd.tensor import SparseTensor


@dataclass(frozen=True)
class EdgeRecord:
    src: int
    dst: int
    weight: float = 1.0
    time: Optional[int] = None


@dataclass
class EdgeList:
    """Parsed records plus the label of every interned host id."""

    records: list[EdgeRecord]
    src_labels: list[str] = field(default_factory=list)
    dst_labels: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self) -> Iterator[EdgeRecord]:
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]


@dataclass(frozen=True, eq=False)
class TrafficTensor:
    """``src x dst x time-bin`` tensor; entry = summed weight of its records."""

    tensor: SparseTensor
    bin_width: float = 1.0
    t_min: int = 0
    src_labels: tuple[str, ...] = ()
    dst_labels: tuple[str, ...] = ()

    @property
    def shape(self):
        return self.tensor.shape


def _open_lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            yield from fh
    elif isinstance(source, bytes):
        yield from io.StringIO(source.decode("utf-8"))
    else:
        yield from source


def parse_edge_list(source: Union[str, os.PathLike, Iterable[str]], require_time: bool = False) -> EdgeList:
    """Parse ``src dst [weight] [time]`` lines; ``%`` and ``#`` start comments.

    Host labels are interned separately for sources and destinations, densely
    and in order of first appearance.
    """
    src_ids: dict[str, int] = {}
    dst_ids: dict[str, int] = {}
    records = []
    for lineno, line in enumerate(_open_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "%#":
            continue
        fields = stripped.split()
        if not 2 <= len(fields) <= 4:
            raise ParseError(f"expected 2 to 4 fields, got {len(fields)}", lineno)
        try:
            weight = float(fields[2]) if len(fields) > 2 else 1.0
            time = None
            if len(fields) > 3:
                t = float(fields[3])
                if t != int(t):
                    raise ValueError(fields[3])
                time = int(t)
        except ValueError as exc:
            raise ParseError(f"malformed number: {exc}", lineno) from None
        if time is None and require_time:
            raise ParseError("missing time field", lineno)
        if time is not None and time < 0:
            raise ParseError("negative timestamp", lineno)
        s = src_ids.setdefault(fields[0], len(src_ids))
        d = dst_ids.setdefault(fields[1], len(dst_ids))
        records.append(EdgeRecord(s, d, weight, time))
    if not records:
        raise EmptyInputError("edge list has no records")
    return EdgeList(records, list(src_ids), list(dst_ids))


def build_tensor(edges, bin_width: float = 1.0) -> TrafficTensor:
    """Bin records by ``floor((t - t_min) / bin_width)`` and accumulate weights."""
    if not bin_width > 0:
        raise ArgumentError(f"bin width must be positive, got {bin_width}")
    records = list(edges)
    if not records:
        raise EmptyInputError("no records to build a tensor from")
    if any(r.time is None for r in records):
        raise ParseError("every record needs a timestamp to build a temporal tensor")
    src = np.fromiter((r.src for r in records), dtype=np.int64, count=len(records))
    dst = np.fromiter((r.dst for r in records), dtype=np.int64, count=len(records))
    w = np.fromiter((r.weight for r in records), dtype=np.float64, count=len(records))
    t = np.fromiter((r.time for r in records), dtype=np.int64, count=len(records))
    t_min = int(t.min())
    bins = np.floor((t - t_min) / bin_width).astype(np.int64)
    shape = (int(src.max()) + 1, int(dst.max()) + 1, int(bins.max()) + 1)
    if isinstance(edges, EdgeList):
        shape = (max(shape[0], len(edges.src_labels)), max(shape[1], len(edges.dst_labels)), shape[2])
    tensor = SparseTensor(shape, np.column_stack([src, dst, bins]), w)
    return TrafficTensor(
        tensor,
        bin_width=bin_width,
        t_min=t_min,
        src_labels=tuple(getattr(edges, "src_labels", ())),
        dst_labels=tuple(getattr(edges, "dst_labels", ())),
    )

