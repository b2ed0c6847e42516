"""Desk-scale toolkit for unbounded-norm convergence in Banach lattices."""

__version__ = "0.1.0"

from .convergence import (  # noqa: F401
    NOT_NULL,
    NULL,
    TailReport,
    ToleranceSpec,
    VectorSequence,
    almost_order_bounded_check,
    in_measure_tail,
    norm_tail,
    order_witness_atomic,
    pairing,
    pointwise_tail,
    sequence_from_list,
    truncation_index,
    un_tail,
    un_tail_qip,
    weak_tail,
)
from .constructive import (  # noqa: F401
    DisjointificationResult,
    OrderSubsequence,
    RieszWitness,
    UoExtraction,
    kp_disjointify,
    kp_disjointify_positive,
    norm_to_order_subsequence,
    riesz_decompose,
    uo_extract,
)
from .spaces import (  # noqa: F401
    DEFAULT_HORIZON,
    DirectSumVector,
    Element,
    LatticeVector,
    MeasureModel,
    SpaceTag,
    StepFunction,
    c0,
    constant_one,
    direct_sum,
    element_from_dict,
    element_to_dict,
    indicator,
    is_disjoint,
    linf,
    lp,
    lp_step,
    ones,
    quasi_interior_point,
    truncate,
    unit,
    zero,
)
from .topology import (  # noqa: F401
    Neighborhood,
    axiom_suite,
    base_intersection,
    contains,
    gauge,
    translate,
)
