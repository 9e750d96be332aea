"""Exact computation workbench for mixed Tsirelson spaces."""

from .families import (
    BddCard,
    CapExceeded,
    Compose,
    Concat,
    Explicit,
    Family,
    FamilyError,
    Normalize,
    Power,
    RAlpha,
    Repeat,
    Schreier,
    Singletons,
    Union,
    bracket,
    check_regular_on_ground,
    contains,
    enumerate_members,
    family_norm,
    is_admissible,
    iterated_deriv_contains,
    parse_family,
    schreier,
    standard_fundamental,
)
from .norm import (
    NormCert,
    TreeNode,
    brute_force_norm,
    evaluate_tree,
    family_cutoff,
    norm,
    restricted_norm,
    validate_tree,
)
from .lab import (
    LabError,
    ParamSchedule,
    ZVector,
    build_z,
    c7_bound,
    dagger_probe,
    decompose_z,
    gamma,
    histories_K,
    histories_N,
    l6_bound,
    reduced_schedule,
    repeated_average,
    select_params,
    spreading_constant,
    submultiplicative_probe,
    verify_l6_bound,
)
from .ordinal import (
    Ordinal,
    OrdinalError,
    format_ordinal,
    leading_exponent,
    max_order_sum,
    parse_ordinal,
)
from .presets import desk_schedule, desk_space, geometric_space, harmonic_space, tsirelson_space
from .space import SpaceSpec, Vector

__version__ = "0.1.0"
