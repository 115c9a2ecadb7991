"""Reduced products of finite binary structures: connectivity, components and path witnesses."""

from .connectivity import (
    ConditionBWitness,
    DiameterStratification,
    ProductPathWitness,
    Segment,
    build_path_witness,
    components_bfs,
    components_criterion,
    condition_b,
    connected_bfs,
    connected_criterion,
    lift_path,
    stratify,
    verify_equivalence,
)
from .filters import Filter, is_ultrafilter, kernel, make_filter, member, restrict, trivial_filter
from .products import (
    ReducedProduct,
    build_direct_product,
    build_reduced_product,
    equiv_mod_filter,
    restrict_iso,
)
from .structure import (
    INF,
    BinaryStructure,
    PathWitness,
    check_path,
    components,
    diameter,
    distance,
    is_connected,
    reflexivize,
    satisfies_conn_formula,
    symmetrize,
)

__version__ = "0.1.0"
