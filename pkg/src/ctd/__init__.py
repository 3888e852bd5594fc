"""Sampling-based LR tensor decompositions for static and streaming sparse tensors."""
from ctd.dynamic import StreamState, chain_product, ctd_d_step, start_stream
from ctd.evaluation import (
    EvalReport,
    memory_usage,
    oracle_projection_error,
    reconstruct,
    reconstruction_error,
    relative_error,
)
from ctd.sampling import (
    ColumnDistribution,
    column_distribution,
    sample_with_replacement,
    unique_first_occurrence,
)
from ctd.static import FiberId, LRFactors, compute_core, ctd_s, try_append_fiber
from ctd.tensor import (
    SparseTensor,
    column_sq_norms,
    fold,
    frobenius_norm,
    matricize,
    n_mode_product,
)

__version__ = "0.1.0"
