"""Exact classification of forgetful maps between moduli of weighted
points on the projective line."""

from .enumeration import (
    MODE_HALF,
    MODE_INT,
    CatalogEntry,
    canonicalize,
    enumerate_catalog,
    enumerate_catalog_naive,
    verify_lcd_bound,
)
from .forgetful import (
    ClassificationVerdict,
    ForgetfulCandidate,
    ScanFilters,
    ScanRecord,
    check_divisibility,
    check_smooth_locus,
    check_symmetry_compat,
    classify_candidate,
    codim1_fixed_elements,
    cross_ratio,
    divisor_fate,
    generate_candidates,
    scan,
)
from .geodesic import (
    InclusionEdge,
    PartitionLattice,
    commensurability_classes,
    hyperbolic_contractions,
    inclusion_dag,
)
from .weights import (
    INFINITY,
    CoincidencePattern,
    Stability,
    SymmetryPartition,
    WeightSystem,
    admissible_partitions,
    check_half_int,
    check_int,
    commensurability_index,
    contract,
    dual,
    finest_partition,
    is_cocompact,
    orbifold_weight,
    orbifold_weight_sym,
    stability_class,
)

__all__ = [
    "CatalogEntry",
    "ClassificationVerdict",
    "CoincidencePattern",
    "ForgetfulCandidate",
    "INFINITY",
    "InclusionEdge",
    "MODE_HALF",
    "MODE_INT",
    "PartitionLattice",
    "ScanFilters",
    "ScanRecord",
    "Stability",
    "SymmetryPartition",
    "WeightSystem",
    "admissible_partitions",
    "canonicalize",
    "check_divisibility",
    "check_half_int",
    "check_int",
    "check_smooth_locus",
    "check_symmetry_compat",
    "classify_candidate",
    "codim1_fixed_elements",
    "commensurability_classes",
    "commensurability_index",
    "contract",
    "cross_ratio",
    "divisor_fate",
    "dual",
    "enumerate_catalog",
    "enumerate_catalog_naive",
    "finest_partition",
    "generate_candidates",
    "hyperbolic_contractions",
    "inclusion_dag",
    "is_cocompact",
    "orbifold_weight",
    "orbifold_weight_sym",
    "scan",
    "stability_class",
    "verify_lcd_bound",
]
