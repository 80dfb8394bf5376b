"""
Вычислительная геометрия выпуклых и p-выпуклых тел в малых размерностях.

Экспортирует тела, объёмы, покрытия, s-числа и экстремальные эллипсоиды.
"""

from .bodies import (
    Body,
    Box,
    CapBody,
    CappedBall,
    Ellipsoid,
    EuclideanBall,
    GaugeResult,
    HPolytope,
    IntersectionBody,
    PConvHull,
    PolarBody,
    StandardBall,
    Transformed,
    aoki_rolewicz_exponent,
    balanced_kernel_contains,
    boundary_points,
    check_certificate,
    contained_in,
    contains,
    convex_hull,
    ellipsoid_shape,
    gauge,
    generator_form,
    polar,
    quasi_norm_constant_estimate,
    scale,
    transform,
    translated_oracle,
)
from .ellipsoids import (
    PositionedPair,
    enclosing_ellipsoid,
    inscribed_ellipsoid,
    milman_functional,
    position_pair,
)
from .errors import (
    DegenerateBodyError,
    DimensionMismatchError,
    GeometryError,
    InequalityViolationError,
    InsufficientBudgetError,
    ResourceExceededError,
    UnsupportedBodyError,
)
from .linear_map import LinearMap
from .measure import (
    Estimate,
    Segment,
    RestrictedSupportSearch,
    SumBody,
    VolumeEstimate,
    exact_volume,
    restricted_search,
    sum_membership,
    volume,
    volume_intersection,
    volume_sum,
)
from .metric import (
    CoverCertificate,
    InequalityCheck,
    SNumberSequence,
    VolumeRatioFactor,
    carl_ratio,
    compose_covers,
    covering_growth,
    covering_upper,
    entropy_numbers,
    kolmogorov_bruteforce,
    kolmogorov_numbers_ellipsoid,
    lemma2_iii_check,
    operator_norm,
    volume_ratio_factor,
)
from .sampling import derive_seeds, random_det_one_matrix, random_orthogonal, sphere_directions

__all__ = [
    # bodies
    "Body",
    "StandardBall",
    "EuclideanBall",
    "Ellipsoid",
    "Box",
    "PConvHull",
    "HPolytope",
    "Transformed",
    "CapBody",
    "CappedBall",
    "PolarBody",
    "IntersectionBody",
    "GaugeResult",
    "gauge",
    "check_certificate",
    "contains",
    "convex_hull",
    "polar",
    "transform",
    "scale",
    "contained_in",
    "ellipsoid_shape",
    "generator_form",
    "boundary_points",
    "translated_oracle",
    "balanced_kernel_contains",
    "aoki_rolewicz_exponent",
    "quasi_norm_constant_estimate",
    "LinearMap",
    # measure
    "Estimate",
    "VolumeEstimate",
    "Segment",
    "SumBody",
    "RestrictedSupportSearch",
    "restricted_search",
    "exact_volume",
    "volume",
    "sum_membership",
    "volume_sum",
    "volume_intersection",
    # metric
    "CoverCertificate",
    "SNumberSequence",
    "InequalityCheck",
    "VolumeRatioFactor",
    "covering_upper",
    "compose_covers",
    "operator_norm",
    "entropy_numbers",
    "kolmogorov_numbers_ellipsoid",
    "kolmogorov_bruteforce",
    "carl_ratio",
    "lemma2_iii_check",
    "covering_growth",
    "volume_ratio_factor",
    # ellipsoids
    "PositionedPair",
    "enclosing_ellipsoid",
    "inscribed_ellipsoid",
    "milman_functional",
    "position_pair",
    # sampling
    "sphere_directions",
    "derive_seeds",
    "random_orthogonal",
    "random_det_one_matrix",
    # errors
    "GeometryError",
    "DimensionMismatchError",
    "DegenerateBodyError",
    "UnsupportedBodyError",
    "ResourceExceededError",
    "InsufficientBudgetError",
    "InequalityViolationError",
]
