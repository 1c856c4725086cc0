from .szego import (
    AsymptoticsReport,
    ModifiedAsymptotics,
    EClass,
    winding_number,
    det_winding,
    geometric_mean,
    determinant_row,
    classify_E,
    widom_finite_E,
    modified_prefactor,
    literal_prefactor,
    verify_modified_asymptotics,
    analyze_asymptotics,
)
from .wiener_hopf import (
    ScalarFactorization,
    wiener_hopf_scalar,
    laurent_roots,
    winding_theorem_log,
    scalar_winding_theorem,
    brute_force_winding_det,
)

__all__ = [
    "AsymptoticsReport", "ModifiedAsymptotics", "EClass",
    "winding_number", "det_winding", "geometric_mean", "determinant_row",
    "classify_E", "widom_finite_E", "modified_prefactor", "literal_prefactor",
    "verify_modified_asymptotics", "analyze_asymptotics",
    "ScalarFactorization", "wiener_hopf_scalar", "laurent_roots", "winding_theorem_log",
    "scalar_winding_theorem", "brute_force_winding_det",
]
