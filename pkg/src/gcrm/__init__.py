"""
gcrm - canonically correlated gamma random vectors and completely random measures.

Exact canonical correlations for every directing-kernel family, the pair
samplers that realise them, subordinated Dawson-Watanabe transitions and
the Monte Carlo estimators that check one against the other.

Usage:
    import numpy as np
    from gcrm import PartitionSpec, algorithm_a3_batch, estimate_canonical_corr

    part = PartitionSpec(alphas=(0.5, 1.0, 2.0))
    batch = algorithm_a3_batch(1.0, part, 100000, np.random.default_rng(1))
    estimate_canonical_corr(batch, part, (1, 1, 0))   # close to 0.25
"""

from .base import (
    BaseDistribution,
    ConfigurationError,
    CorrelationIndex,
    DiscreteLaw,
    DomainError,
    GcrmError,
    JumpLaw,
    PartitionSpec,
    PolyIndex,
    RangeError,
)
from .config import Config, get_config, reload_config
from .dirichlet import (
    DirichletMeanSpec,
    IdentityGap,
    base_moments,
    mean_moments,
    merge_bases,
    moment_recursion,
    sample_dirichlet_mean,
    sample_dirichlet_means,
    stieltjes_identity_gap,
)
from .estimators import (
    CorrelationEntry,
    CorrelationReport,
    SummandAccumulator,
    correlation_report,
    estimate_canonical_corr,
    factorization_gap,
    moment_match_report,
    orthogonality_scan,
)
from .kernels import (
    BellComparison,
    BetaLaw,
    CommonComponent,
    DegenerateConstant,
    DirectingKernel,
    LaplaceSeries,
    PerCellDistribution,
    RandomConstant,
    bell_form_comparison,
    canonical_corr_exact,
    closed_form_laplace_ratio,
    conditional_laplace_extreme,
    extreme_joint_laplace,
    extreme_pair_density,
    get_kernel,
    joint_laplace_ratio,
    joint_laplace_series,
    merge_corr,
    merge_partition,
    merged_cell_corr,
)
from .samplers import (
    FiniteVectorLaw,
    PairBatch,
    algorithm_a1,
    algorithm_a1_batch,
    algorithm_a2,
    algorithm_a2_batch,
    algorithm_a3,
    algorithm_a3_batch,
    algorithm_a4,
    algorithm_a4_batch,
    derive_streams,
    dw_pair_batch,
    dw_transition_batch,
    dw_transition_step,
    dw_z,
    sample_common_component,
    sample_directed_pairs,
    sample_gamma_vector,
    sample_gamma_vectors,
    sample_pair_general,
    sample_pair_general_batch,
)
from .specfun import (
    bell_complete,
    bell_partial,
    bessel_i,
    hyp1f1_laguerre,
    laguerre_generating_function,
    laguerre_laplace,
    laguerre_norm,
    laguerre_quadrature,
    laguerre_table,
    laguerre_tilde,
    log_pochhammer,
    pochhammer,
)
from .subordination import (
    SubordinatorSpec,
    laplace_exponent,
    markov_corr,
    poissonized_corr,
    poissonized_pair_batch,
    sample_increment,
    sample_increments,
    sample_poissonized_chain,
    subordinated_dw_batch,
    subordinated_dw_step,
    subordinated_pair_batch,
)

__all__ = [
    # Types and errors
    "BaseDistribution",
    "ConfigurationError",
    "CorrelationIndex",
    "DiscreteLaw",
    "DomainError",
    "GcrmError",
    "JumpLaw",
    "PartitionSpec",
    "PolyIndex",
    "RangeError",
    # Config
    "Config",
    "get_config",
    "reload_config",
    # Special functions
    "bell_complete",
    "bell_partial",
    "bessel_i",
    "hyp1f1_laguerre",
    "laguerre_generating_function",
    "laguerre_laplace",
    "laguerre_norm",
    "laguerre_quadrature",
    "laguerre_table",
    "laguerre_tilde",
    "log_pochhammer",
    "pochhammer",
    # Dirichlet means
    "DirichletMeanSpec",
    "IdentityGap",
    "base_moments",
    "mean_moments",
    "merge_bases",
    "moment_recursion",
    "sample_dirichlet_mean",
    "sample_dirichlet_means",
    "stieltjes_identity_gap",
    # Kernels
    "BellComparison",
    "BetaLaw",
    "CommonComponent",
    "DegenerateConstant",
    "DirectingKernel",
    "LaplaceSeries",
    "PerCellDistribution",
    "RandomConstant",
    "bell_form_comparison",
    "canonical_corr_exact",
    "closed_form_laplace_ratio",
    "conditional_laplace_extreme",
    "extreme_joint_laplace",
    "extreme_pair_density",
    "get_kernel",
    "joint_laplace_ratio",
    "joint_laplace_series",
    "merge_corr",
    "merge_partition",
    "merged_cell_corr",
    # Samplers
    "FiniteVectorLaw",
    "PairBatch",
    "algorithm_a1",
    "algorithm_a1_batch",
    "algorithm_a2",
    "algorithm_a2_batch",
    "algorithm_a3",
    "algorithm_a3_batch",
    "algorithm_a4",
    "algorithm_a4_batch",
    "derive_streams",
    "dw_pair_batch",
    "dw_transition_batch",
    "dw_transition_step",
    "dw_z",
    "sample_common_component",
    "sample_directed_pairs",
    "sample_gamma_vector",
    "sample_gamma_vectors",
    "sample_pair_general",
    "sample_pair_general_batch",
    # Subordination
    "SubordinatorSpec",
    "laplace_exponent",
    "markov_corr",
    "poissonized_corr",
    "poissonized_pair_batch",
    "sample_increment",
    "sample_increments",
    "sample_poissonized_chain",
    "subordinated_dw_batch",
    "subordinated_dw_step",
    "subordinated_pair_batch",
    # Estimators
    "CorrelationEntry",
    "CorrelationReport",
    "SummandAccumulator",
    "correlation_report",
    "estimate_canonical_corr",
    "factorization_gap",
    "moment_match_report",
    "orthogonality_scan",
]

__version__ = "0.1.0"
