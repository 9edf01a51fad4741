"""Predictivity statistics and partition-retention variable selection.

Thin wrapper around the compiled extension. The C++ CLI (`iscore`) exposes the
same operations for batch use.
"""

from ._core import (
    DiseaseModel,
    bias_grid,
    conditional_tables,
    error_bound,
    expected_min,
    genotype_dist,
    i_score,
    j_score,
    neg_rel_bias,
    oracle_params,
    retention_scores,
    simulate,
    theta_e_train,
    tie_half_prob,
    __version__,
)

__all__ = [
    "DiseaseModel",
    "bias_grid",
    "conditional_tables",
    "error_bound",
    "expected_min",
    "genotype_dist",
    "i_score",
    "j_score",
    "neg_rel_bias",
    "oracle_params",
    "retention_scores",
    "simulate",
    "theta_e_train",
    "tie_half_prob",
    "__version__",
]
