from .indices import (
    ClassTag,
    SymmetryClass,
    IndexReport,
    detect_class,
    kitaev_index,
    winding_index,
    predict_zero_modes,
)

__all__ = [
    "ClassTag", "SymmetryClass", "IndexReport",
    "detect_class", "kitaev_index", "winding_index", "predict_zero_modes",
]
