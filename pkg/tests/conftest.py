import numpy as np
import pytest
from hypothesis import strategies as st

from ctd.tensor import SparseTensor


def random_sparse(shape, density, rng, integer=False):
    dense = rng.standard_normal(shape)
    if integer:
        dense = np.rint(4 * dense)
    dense[rng.random(shape) >= density] = 0.0
    return SparseTensor.from_dense(dense)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def sparse_tensors(draw, max_modes=4, max_extent=6):
    ndim = draw(st.integers(1, max_modes))
    shape = tuple(draw(st.lists(st.integers(1, max_extent), min_size=ndim, max_size=ndim)))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.floats(0.0, 1.0))
    return random_sparse(shape, density, np.random.default_rng(seed))
