"""
Sign/phase plus log-magnitude numbers.

Determinants of T_n and powers like G^n leave double precision range long
before n gets interesting, so every such quantity travels as
``phase * exp(log_abs)``.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

Number = Union[int, float, complex]

# phases closer than this to the real axis are snapped to +-1
_REAL_SNAP = 1e-12


def _normalize_phase(phase: complex) -> complex:
    magnitude = abs(phase)
    if magnitude == 0 or not math.isfinite(magnitude):
        return complex(1.0)
    phase = complex(phase) / magnitude
    if abs(phase.imag) < _REAL_SNAP:
        return complex(1.0 if phase.real > 0 else -1.0)
    return phase


@dataclass(frozen=True)
class SignedLogValue:
    log_abs: float
    phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "log_abs", float(self.log_abs))
        object.__setattr__(self, "phase", _normalize_phase(self.phase))

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(-math.inf, 1.0)

    @classmethod
    def one(cls) -> "SignedLogValue":
        return cls(0.0, 1.0)

    @classmethod
    def from_value(cls, value: Number) -> "SignedLogValue":
        value = complex(value)
        if value == 0:
            return cls.zero()
        return cls(math.log(abs(value)), value)

    @classmethod
    def from_log(cls, log_value: complex) -> "SignedLogValue":
        """From a complex logarithm ``log|x| + i arg x``"""
        log_value = complex(log_value)
        return cls(log_value.real, cmath.exp(1j * log_value.imag))

    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    @property
    def is_real(self) -> bool:
        return self.phase.imag == 0.0

    @property
    def sign(self) -> float:
        """+-1 for real values, 0 for zero"""
        if self.is_zero:
            return 0.0
        if not self.is_real:
            raise ValueError("sign of a non-real SignedLogValue")
        return self.phase.real

    @property
    def log(self) -> complex:
        return complex(self.log_abs, cmath.phase(self.phase))

    @property
    def value(self) -> complex:
        if self.is_zero:
            return 0j
        if self.log_abs > 709.0:
            return self.phase * math.inf
        return self.phase * math.exp(self.log_abs)

    @property
    def real_value(self) -> float:
        return self.value.real

    def __mul__(self, other: Union["SignedLogValue", Number]) -> "SignedLogValue":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return SignedLogValue.zero()
        return SignedLogValue(self.log_abs + other.log_abs, self.phase * other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["SignedLogValue", Number]) -> "SignedLogValue":
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.is_zero:
            return SignedLogValue.zero()
        return SignedLogValue(self.log_abs - other.log_abs, self.phase / other.phase)

    def __rtruediv__(self, other: Number) -> "SignedLogValue":
        return _coerce(other) / self

    def __pow__(self, exponent: int) -> "SignedLogValue":
        exponent = int(exponent)
        if exponent == 0:
            return SignedLogValue.one()
        if self.is_zero:
            if exponent < 0:
                raise ZeroDivisionError("negative power of zero")
            return SignedLogValue.zero()
        return SignedLogValue(self.log_abs * exponent, self.phase**exponent)

    def __neg__(self) -> "SignedLogValue":
        return SignedLogValue(self.log_abs, -self.phase)

    def isclose(self, other: Union["SignedLogValue", Number], rel_tol: float = 1e-9) -> bool:
        """Relative comparison done in log space"""
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        ratio = self / other
        if abs(ratio.log_abs) > 1.0:
            return False
        return abs(cmath.exp(complex(ratio.log_abs, cmath.phase(ratio.phase))) - 1.0) <= rel_tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "log_abs": self.log_abs,
            "phase_re": self.phase.real,
            "phase_im": self.phase.imag,
        }


def _coerce(value: Union[SignedLogValue, Number]) -> SignedLogValue:
    if isinstance(value, SignedLogValue):
        return value
    if isinstance(value, np.generic):
        value = value.item()
    return SignedLogValue.from_value(value)
