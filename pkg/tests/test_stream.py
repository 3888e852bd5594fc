import numpy as np
import pytest

from conftest import random_sparse
from ctd.app.datasets import low_rank_tensor
from ctd.app.stream import StreamConfig, run_stream, split_point
from ctd.errors import ArgumentError, ShapeError
from ctd.tensor import concatenate, time_slabs


def test_split_arithmetic():
    assert split_point(10, 0.8) == 8
    assert split_point(100, 0.8) == 80
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ArgumentError):
            split_point(10, bad)


def test_partition_is_lossless(rng):
    X = random_sparse((5, 4, 10), 0.2, rng)
    n = split_point(10, 0.8)
    parts = [X.take_range(2, 0, n)] + time_slabs(X)[n:]
    assert concatenate(parts, 2) == X


def test_run_stream_exact_rank_two():
    X = low_rank_tensor((10, 8, 10), 2, mode=0, density=0.4, seed=1, onset=[0, 9])
    res = run_stream(X, StreamConfig(s=200, d=40, seed=3))
    assert res.historical_steps == 8 and len(res.reports) == 2
    assert [r.step for r in res.reports] == [1, 2]
    assert all(r.relative_error <= 1e-10 for r in res.reports)
    assert res.reports[-1].kept_fibers == 2
    assert res.factors.core.shape == (2, 8, 10)
    assert res.mean("relative_error") <= 1e-10


def test_run_stream_short_tensor(rng):
    with pytest.raises(ShapeError):
        run_stream(random_sparse((4, 4, 4), 0.5, rng))


def test_default_step_samples():
    assert StreamConfig(s=1000).step_samples == 10
    assert StreamConfig(s=50).step_samples == 1
    assert StreamConfig(s=50, d=7).step_samples == 7
