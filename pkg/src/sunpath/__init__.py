"""Simulator and verification suite for pathfinding on regular sunflower graphs."""

from .errors import (
    ArtifactNotFound,
    DegenerateDistribution,
    DomainError,
    ExhaustiveTooLarge,
    ExplicitTooLarge,
    ImplicitBackendUnsupported,
    InvalidParams,
    NonpositiveGap,
    SingularMatrix,
    SunpathError,
)
from .graph import (
    ExpansionGuaranteeWarning,
    GraphParams,
    SunflowerGraph,
    build_graph,
    closed_form_edge_count,
    validate_params,
)
from .hamiltonian import (
    EffectiveHamiltonian,
    build_h,
    subspace_embedding,
    verify_invariance,
    verify_restriction,
)
from .spectral import (
    SpectrumReport,
    ZeroModes,
    factor_spectrum,
    h1_determinant,
    h1_inverse,
    inf_norm_bound,
    root_overlaps,
    spectral_gap,
    zero_modes,
)
from .filtering import (
    FilterSpec,
    apply_filter,
    choose_degree,
    eval_r,
    plan_filter,
    residual_bound,
    robustness_bound,
)
from .qsim import (
    MeasurementDistribution,
    PathResult,
    QueryLedger,
    choose_ns,
    ideal_distribution,
    prepare_algorithm,
    query_cost,
    run_algorithm1,
    run_trials,
    sample_vertex,
)
from .classical import (
    ExplorationOutcome,
    ExplorerConfig,
    estimate_success,
    run_explorer,
    wilson_interval,
)
from .expansion import adjacency_gap, bipartite_check, vertex_expansion_sample

__version__ = "0.1.0"
