from .matrices import StructuredMatrix, MatrixKind, build_toeplitz, build_circulant
from .linalg import (
    Eigensystem,
    as_array,
    log_det,
    pfaffian,
    solve,
    spectrum,
    eigensystem,
    matrix_structure,
    circulant_log_det,
    circulant_spectrum,
)

__all__ = [
    "StructuredMatrix", "MatrixKind", "build_toeplitz", "build_circulant",
    "Eigensystem", "as_array", "log_det", "pfaffian", "solve", "spectrum",
    "eigensystem", "matrix_structure", "circulant_log_det", "circulant_spectrum",
]
