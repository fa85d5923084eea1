"""Exponential moments of bounded-diameter complex random variables.

Tools around the deviation bound |E e^{Z-EZ} - 1| <= e^{d^2/8} - 1 for
finitely supported complex Z of diameter at most d: the tight two-point
value G(d), searches over two- and three-point families, mixture
decompositions into laws on at most three points, and sampled pictures
of the attainable regions of E e^Z.
"""

from .bounds import (
    BoundReport,
    envelope,
    extremal_prob,
    extremal_two_point,
    g_function,
    integral_identity_check,
    technical_check,
)
from .caratheodory import MixtureDecomposition, decompose, zero_simplex_subset
from .complex_dist import (
    Disk,
    FiniteDistribution,
    dumps,
    enclosing_disk,
    loads,
    mix,
)
from .families import (
    ExpansionCoefficients,
    StationaryFrame,
    TriangleSupport,
    TwoPointParams,
    canonical_two_point,
    centered_functional,
    expansion_coefficients,
    hessian_fd,
    q_det_claim,
    q_matrix,
    q_trace_claim,
    r_matrix,
    r_matrix_min_eig,
    stationary_frame,
    triangle_dist,
    two_point,
    two_point_objective,
)
from .regions import (
    BoundaryCurve,
    RegionCloud,
    StarlikeReport,
    convexity_gap,
    member_from_params,
    rasterize,
    sample_region,
    starlike_check,
    trace_boundary,
)
from .search import (
    D0Result,
    OptimizationResult,
    compute_d0,
    find_stationary_support,
    minimize_two_point_re,
    nearest_three_point,
    sup_abs_three_point,
    sup_abs_two_point,
)

__version__ = "1.0.0"

__all__ = [
    "BoundReport",
    "BoundaryCurve",
    "D0Result",
    "Disk",
    "ExpansionCoefficients",
    "FiniteDistribution",
    "MixtureDecomposition",
    "OptimizationResult",
    "RegionCloud",
    "StarlikeReport",
    "StationaryFrame",
    "TriangleSupport",
    "TwoPointParams",
    "canonical_two_point",
    "centered_functional",
    "compute_d0",
    "convexity_gap",
    "decompose",
    "dumps",
    "enclosing_disk",
    "envelope",
    "expansion_coefficients",
    "extremal_prob",
    "extremal_two_point",
    "find_stationary_support",
    "g_function",
    "hessian_fd",
    "integral_identity_check",
    "loads",
    "member_from_params",
    "minimize_two_point_re",
    "mix",
    "nearest_three_point",
    "q_det_claim",
    "q_matrix",
    "q_trace_claim",
    "r_matrix",
    "r_matrix_min_eig",
    "rasterize",
    "sample_region",
    "stationary_frame",
    "starlike_check",
    "sup_abs_three_point",
    "sup_abs_two_point",
    "technical_check",
    "trace_boundary",
    "triangle_dist",
    "two_point",
    "two_point_objective",
    "__version__",
]
