"""Mutation dynamics and G-fan geometry of rank-3 cluster-cyclic exchange matrices.

The package is organized in four layers: validated matrix arithmetic
(:mod:`cyclicfan.matrices`), seed states along the reduced-word tree
(:mod:`cyclicfan.seeds`), cones and upper bounds with executable theorem
verifiers (:mod:`cyclicfan.cones`, :mod:`cyclicfan.bounds`,
:mod:`cyclicfan.checks`), and a CLI with stereographic SVG rendering
(:mod:`cyclicfan.cli`, :mod:`cyclicfan.render`).

All values are immutable after construction and every operation is a pure
function, so the API is safe to use from concurrent workers without
synchronization.
"""

__version__ = "0.1.0"

from .bounds import (
    LocalBound,
    QuadrantClass,
    QuadraticBound,
    TrunkSupport,
    frak_c,
    frak_c_limit,
    global_bound,
    initial_bound,
    local_bound,
    trunk_support,
)
from .checks import (
    CHECK_NAMES,
    Report,
    Violation,
    check_fan_structure,
    check_global_bound,
    check_local_bounds,
    check_monotonicity,
    check_nonperiodicity,
    check_separateness,
    check_sign_table,
    check_simplified_bound,
    run_checks,
)
from .cones import Cone, g_cone
from .errors import (
    AmbiguousDescent,
    AtAntipode,
    CyclicFanError,
    DepthExceeded,
    DomainError,
    DuplicateFound,
    LabelContradiction,
    NoSymmetrizer,
    NotBranch,
    NotClusterCyclic,
    NotCyclic,
    NotSkewSymmetrizable,
    SignMismatch,
    ViolationFound,
)
from .io import format_matrix, load_matrix, parse_matrix
from .matrices import (
    AbsOrder,
    CyclicityCheck,
    DecreasingSequence,
    EigenData,
    ExchangeMatrix,
    SkewPairs,
    SurfaceKind,
    abs_leq,
    alpha,
    chebyshev_u,
    decreasing_sequence,
    eigen_analysis,
    is_cluster_cyclic,
    markov_constant,
    mutate,
    mutate_word,
    pseudo_cartan,
    pseudo_cartan_sk,
    skew_pairs,
    skew_symmetrize,
    validate,
)
from .projection import ProjectedPoint, stereo_project
from .render import RenderScene, build_scene, render_fan, scene_to_svg
from .seeds import (
    ModifiedVectors,
    SeedState,
    TreePosition,
    act,
    classify_position,
    initial_seed,
    iter_seeds,
    kst_labels,
    limit_directions,
    modified_vectors,
    mutate_seed,
    replay,
    s_power_fast,
    seed_record,
)
from .tolerances import DEPTH_CAP, EPS_EQ, EPS_SIGN
from .words import is_reduced, word_product
