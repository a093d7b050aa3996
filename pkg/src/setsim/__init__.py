"""setsim: set similarities, their modularity structure, and LSH verification."""

from .catalog import (
    ClassificationReport,
    MetricResult,
    SimilaritySpec,
    check_metric,
    classify,
    eval_similarity,
    expected_classification,
    gamma_counterexample_matrix,
    is_lshable,
    similarity_matrix,
    slice_table,
)
from .construct import (
    CshsCounterexample,
    ModularSpec,
    PGFCheck,
    PGFSpec,
    cshs_counterexample,
    cshs_from_profile,
    decompose_shs,
    is_pgf_dilution,
    pgf_transform,
    shs_from_supermodular,
    similarity_from_slice_function,
)
from .lsh import (
    CollisionReport,
    CollisionRow,
    ExactUnsupportedError,
    HashFamily,
    NotLSHableError,
    bit_sampling_family,
    empirical_collision,
    exact_collision,
    family_for_similarity,
    intersection_family,
    minhash_family,
    pgf_compose_family,
    verify_lsh,
)
from .setfunctions import (
    CardinalityProfile,
    Certificate,
    PreconditionError,
    SetFunctionTable,
    cardinality_profile_of,
    is_convex_profile,
    is_modular,
    is_monotone,
    is_submodular,
    is_supermodular,
    product_supermodularity_check,
    second_order_difference,
)
from .sets import (
    GreekCounts,
    Subset,
    Universe,
    UniverseMismatchError,
    enumerate_subsets,
    greek_decompose,
    symmetric_difference,
)

__version__ = "0.1.0"

__all__ = [
    "CardinalityProfile",
    "Certificate",
    "ClassificationReport",
    "CollisionReport",
    "CollisionRow",
    "CshsCounterexample",
    "ExactUnsupportedError",
    "GreekCounts",
    "HashFamily",
    "MetricResult",
    "ModularSpec",
    "NotLSHableError",
    "PGFCheck",
    "PGFSpec",
    "PreconditionError",
    "SetFunctionTable",
    "SimilaritySpec",
    "Subset",
    "Universe",
    "UniverseMismatchError",
    "bit_sampling_family",
    "cardinality_profile_of",
    "check_metric",
    "classify",
    "cshs_counterexample",
    "cshs_from_profile",
    "decompose_shs",
    "empirical_collision",
    "enumerate_subsets",
    "eval_similarity",
    "exact_collision",
    "expected_classification",
    "family_for_similarity",
    "gamma_counterexample_matrix",
    "greek_decompose",
    "intersection_family",
    "is_convex_profile",
    "is_lshable",
    "is_modular",
    "is_monotone",
    "is_pgf_dilution",
    "is_submodular",
    "is_supermodular",
    "minhash_family",
    "pgf_compose_family",
    "pgf_transform",
    "product_supermodularity_check",
    "second_order_difference",
    "shs_from_supermodular",
    "similarity_from_slice_function",
    "similarity_matrix",
    "slice_table",
    "symmetric_difference",
    "verify_lsh",
]
