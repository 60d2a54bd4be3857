"""entcrit: multiqubit entanglement classification from matrix elements.

Separability criteria that read off density-matrix entries directly,
constructive biseparability certificates for GHZ-diagonal three-qubit
states, local-filter violation search, noise and relaxation thresholds,
and Monte-Carlo soundness harnesses, with a CLI on top.
"""

from .criteria import (
    BiseparabilityCriterion,
    CriterionReport,
    MonomialCriterion,
    SUBSTITUTION_SUITE,
    applicable_criteria,
    derive_biseparability_criterion,
    dicke4_biseparability,
    estimate_offdiagonal,
    evaluate_criterion,
    fullsep_base,
    fullsep_monomial,
    fullsep_w3,
    ghz3_biseparability,
    ghzN_biseparability,
    offdiag_sum,
    substitution_suite,
    w3_biseparability,
    w3_fidelity_form,
    w4_biseparability,
)
from .decoherence import (
    RelaxationParams,
    gme_survival_numeric,
    gme_survival_threshold,
    relaxation_channel,
    relaxed_ghz,
    relaxed_ghz_shells,
)
from .decompose import (
    BiseparableDecomposition,
    BlockState,
    GmeRefusal,
    block_state,
    decompose,
    is_gme,
    normal_form,
    verify_decomposition,
)
from .families import (
    AcinFamilyParams,
    CornerDiagonalState,
    GhzDiagonal3,
    acin_state,
    dicke,
    ghz,
    ghz_basis,
    ghz_diagonal_3,
    noisy_ghz,
    noisy_ghz_shells,
    w,
    white_noise_mix,
)
from .filters import LocalFilterSet, decoherence_filter, optimize_violation
from .oracle import (
    ppt_check,
    random_pure_biseparable,
    random_pure_product,
    soundness_sweep,
    threshold_bisection,
)
from .qstate import (
    Bipartition,
    DensityMatrix,
    EntcritError,
    PureState,
    apply_local,
    complement,
    diagonal_entry,
    fidelity,
    partial_transpose,
    weight,
)

__version__ = "0.1.0"
