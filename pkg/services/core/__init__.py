from .errors import (
    SzegoLabError,
    ValidationError,
    HypothesisViolation,
    GaplessSymbolError,
    SingularSampleError,
    NonzeroWindingError,
    ConvergenceError,
    SingularMatrixError,
)
from .signed_log import SignedLogValue

__all__ = [
    "SzegoLabError", "ValidationError", "HypothesisViolation",
    "GaplessSymbolError", "SingularSampleError", "NonzeroWindingError",
    "ConvergenceError", "SingularMatrixError", "SignedLogValue",
]
