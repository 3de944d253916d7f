"""Executable polyhedral theory of submodular set functions."""

from .core import (
    TOL,
    CapExceededError,
    ConcaveOverModular,
    Coverage,
    Flags,
    GraphCut,
    GroundSet,
    MatroidRank,
    Modular,
    PermutationError,
    PreconditionError,
    SetFunction,
    SquaredCardinality,
    SubmodError,
    SubsetError,
    as_mask,
    dual,
    elements,
    evaluate,
    gain,
    normalize,
    random_function,
    validate,
)
from .polyhedra import (
    MembershipVerdict,
    Polyhedron,
    base_polytope,
    greedy_vertex,
    inner_box,
    inner_conv,
    lower_polyhedron,
    membership,
    positive_max_exists,
    sub_outer11,
    subdiff_vertex,
    subdifferential,
    super_outer,
    superdifferential,
    upper_polyhedron,
)
from .bounds import (
    ModularBound,
    NemhauserBound,
    modular_lower_bound,
    modular_upper_bound,
    nemhauser_bound,
    supergradient,
)
from .optimize import (
    Certificate,
    CertificateKind,
    OptResult,
    brute_force_optimize,
    certificate,
    local_search,
    one_third_max,
)

__version__ = "0.1.0"
