"""
Szego Lab error hierarchy
Every failure carries a stable code and the CLI exit status it maps to
"""

from typing import Any, Dict, Optional


class SzegoLabError(Exception):
    """Base class for all library errors"""

    code = "error"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": False,
            "error": self.code,
            "message": self.message,
            "details": self.details,
        }


# ============================================================================
# VALIDATION (exit 1)
# ============================================================================

class ValidationError(SzegoLabError):
    code = "validation_error"


class DimensionMismatchError(ValidationError):
    code = "dimension_mismatch"


class DuplicateIndexError(ValidationError):
    code = "duplicate_index"


class SizeCapExceededError(ValidationError):
    code = "size_cap_exceeded"


class BandTooWideError(ValidationError):
    code = "band_too_wide"


class AsymmetryError(ValidationError):
    code = "asymmetry"


class StructureError(ValidationError):
    """Matrix is neither real antisymmetric nor hermitian"""

    code = "unsupported_structure"


class FixtureParameterError(ValidationError):
    code = "fixture_parameter"


class MissingFactorizationError(ValidationError):
    code = "missing_factorization"


class PreconditionError(ValidationError):
    code = "precondition"


class InsufficientDataError(PreconditionError):
    code = "insufficient_data"


class UnresolvableCoefficientError(PreconditionError):
    code = "unresolvable_coefficient"


class UnderflowError(PreconditionError):
    code = "underflow"


class SymbolFileError(ValidationError):
    code = "symbol_file"


# ============================================================================
# THEOREM HYPOTHESES (exit 2)
# ============================================================================

class HypothesisViolation(SzegoLabError):
    code = "hypothesis_violation"
    exit_code = 2


class GaplessSymbolError(HypothesisViolation):
    """Symbol (or a derived scalar) vanishes somewhere on the unit circle"""

    code = "gapless"


class SingularSampleError(GaplessSymbolError):
    code = "singular_sample"


class NonzeroWindingError(HypothesisViolation):
    code = "nonzero_winding"


class ConvergenceError(HypothesisViolation):
    code = "no_convergence"


class SingularMatrixError(HypothesisViolation):
    code = "singular_matrix"
