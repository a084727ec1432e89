"""Holevo's just-as-good fidelity, Petz quasi-entropies and Petz recovery.

Dense-matrix implementations of the fidelity measures and recovery maps, and
numerical certificates for the refined data-processing inequality.
"""

from .channels import (
    Isometry,
    KrausMap,
    QuantumChannel,
    adjoint_apply,
    apply_channel,
    petz_isometric_extension_V,
    petz_recovery_general,
    petz_recovery_partial_trace,
    random_channel,
    stinespring_isometry,
    validate_cptp,
)
from .divergences import (
    AlphaParameter,
    QuadratureConfig,
    holevo_fidelity,
    nu_alpha,
    quasi_entropy_alpha,
    trace_distance,
    uhlmann_fidelity,
    weight_functions,
)
from .numkernel import (
    BipartiteShape,
    hermitian_eig,
    kron,
    matrix_function,
    partial_trace,
    permute_systems,
    polar_unitary,
    schatten_norm,
)
from .recoverability import (
    BoundReport,
    DeltaPair,
    alpha_inequality_check,
    build_delta_operators,
    dilation_consistency_check,
    general_channel_check,
    lemma1_check,
    main_inequality_check,
    optimal_T,
)
from .states import (
    DensityOperator,
    PositiveOperator,
    canonical_purification,
    max_entangled_vector,
    random_density,
    regularize_pd,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaParameter",
    "BipartiteShape",
    "BoundReport",
    "DeltaPair",
    "DensityOperator",
    "Isometry",
    "KrausMap",
    "PositiveOperator",
    "QuadratureConfig",
    "QuantumChannel",
    "adjoint_apply",
    "alpha_inequality_check",
    "apply_channel",
    "build_delta_operators",
    "canonical_purification",
    "dilation_consistency_check",
    "general_channel_check",
    "hermitian_eig",
    "holevo_fidelity",
    "kron",
    "lemma1_check",
    "main_inequality_check",
    "matrix_function",
    "max_entangled_vector",
    "nu_alpha",
    "optimal_T",
    "partial_trace",
    "permute_systems",
    "petz_isometric_extension_V",
    "petz_recovery_general",
    "petz_recovery_partial_trace",
    "polar_unitary",
    "quasi_entropy_alpha",
    "random_channel",
    "random_density",
    "regularize_pd",
    "schatten_norm",
    "stinespring_isometry",
    "trace_distance",
    "uhlmann_fidelity",
    "validate_cptp",
    "weight_functions",
]
