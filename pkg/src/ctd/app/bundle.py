"""Factor bundles: a directory of plain-text files.

``manifest.txt``  key/value lines: magic, format version, shape, mode, rank,
                  epsilon, seed, kept fiber columns, sampled columns
``R.txt``         ``row col value`` triples
``C.txt``         ``i_1 ... i_N value`` tuples of the core
``U.txt``         one row of ``U`` per line

Indices (including the mode and fiber columns) are 1-based on disk; floats are
written with 17 significant digits so a round trip is exact.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy import sparse

from ctd.errors import BundleError
from ctd.static import FiberId, LRFactors
from ctd.tensor import SparseTensor

MAGIC = "ctd-factors"
VERSION = 1
_MEMBERS = ("manifest.txt", "R.txt", "C.txt", "U.txt")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _ints(values) -> str:
    return " ".join(str(int(v)) for v in values)


def save_factors(factors: LRFactors, directory) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    manifest = [
        MAGIC,
        f"version {VERSION}",
        f"shape {_ints(factors.shape)}",
        f"mode {factors.mode + 1}",
        f"rank {factors.rank}",
        f"epsilon {_fmt(factors.epsilon)}",
        f"seed {'none' if factors.seed is None else int(factors.seed)}",
        f"kept {_ints(f.column + 1 for f in factors.fiber_ids)}".rstrip(),
        f"sampled {_ints(j + 1 for j in factors.sampled_columns)}".rstrip(),
    ]
    (out / "manifest.txt").write_text("\n".join(manifest) + "\n")

    R = sparse.coo_matrix(factors.R)
    order = np.lexsort((R.row, R.col))
    with open(out / "R.txt", "w") as fh:
        for r, c, v in zip(R.row[order], R.col[order], R.data[order]):
            fh.write(f"{r + 1} {c + 1} {_fmt(v)}\n")
    with open(out / "C.txt", "w") as fh:
        for idx, v in zip(factors.core.indices, factors.core.values):
            fh.write(f"{_ints(idx + 1)} {_fmt(v)}\n")
    with open(out / "U.txt", "w") as fh:
        for row in factors.U:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")
    return out


def _read_manifest(path: Path) -> dict[str, list[str]]:
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise BundleError(f"{path} is not a factor manifest (bad magic)")
    fields = {}
    for line in lines[1:]:
        if line.strip():
            key, *rest = line.split()
            fields[key] = rest
    try:
        version = int(fields["version"][0])
    except (KeyError, IndexError, ValueError):
        raise BundleError("manifest has no valid version") from None
    if version != VERSION:
        raise BundleError(f"unsupported bundle version {version} (expected {VERSION})")
    missing = {"shape", "mode", "rank", "epsilon", "seed", "kept"} - fields.keys()
    if missing:
        raise BundleError(f"manifest lacks {sorted(missing)}")
    return fields


def _table(path: Path, width: int) -> np.ndarray:
    text = path.read_text()
    if not text.strip():
        return np.empty((0, width))
    try:
        rows = [[float(v) for v in line.split()] for line in text.splitlines() if line.strip()]
        table = np.asarray(rows, dtype=np.float64)
    except ValueError as exc:
        raise BundleError(f"{path.name}: {exc}") from None
    if table.ndim != 2 or table.shape[1] != width:
        raise BundleError(f"{path.name}: expected {width} columns per line")
    return table


def load_factors(directory) -> LRFactors:
    src = Path(directory)
    for name in _MEMBERS:
        if not (src / name).is_file():
            raise BundleError(f"bundle {src} is missing {name}")
    fields = _read_manifest(src / "manifest.txt")
    try:
        shape = tuple(int(v) for v in fields["shape"])
        mode = int(fields["mode"][0]) - 1
        rank = int(fields["rank"][0])
        epsilon = float(fields["epsilon"][0])
        seed = None if fields["seed"][0] == "none" else int(fields["seed"][0])
        kept = [int(v) - 1 for v in fields["kept"]]
        sampled = tuple(int(v) - 1 for v in fields.get("sampled", []))
    except (IndexError, ValueError) as exc:
        raise BundleError(f"corrupt manifest: {exc}") from None
    if not 0 <= mode < len(shape) or len(kept) != rank:
        raise BundleError("manifest mode or kept fiber count is inconsistent")

    R = _table(src / "R.txt", 3)
    core = _table(src / "C.txt", len(shape) + 1)
    U = _table(src / "U.txt", rank) if rank else np.zeros((0, 0))
    if U.shape != (rank, rank):
        raise BundleError(f"U.txt holds a {U.shape} matrix, expected {rank}x{rank}")
    core_shape = list(shape)
    core_shape[mode] = rank
    try:
        R_mat = sparse.csc_matrix(
            (R[:, 2], (R[:, 0].astype(np.int64) - 1, R[:, 1].astype(np.int64) - 1)),
            shape=(shape[mode], rank),
        )
        C = SparseTensor(core_shape, core[:, :-1].astype(np.int64) - 1, core[:, -1])
    except ValueError as exc:
        raise BundleError(f"corrupt factor file: {exc}") from None
    R_mat.sum_duplicates()
    return LRFactors(
        core=C,
        U=U,
        R=R_mat,
        mode=mode,
        fiber_ids=tuple(FiberId.decode(shape, mode, j) for j in kept),
        epsilon=epsilon,
        seed=seed,
        sampled_columns=sampled,
    )
