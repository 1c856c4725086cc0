"""
Dense block Toeplitz and block circulant realizations of a symbol
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from backend.config import get_config
from services.core.errors import BandTooWideError, SizeCapExceededError, ValidationError
from services.symbols import Symbol

logger = logging.getLogger("szego_lab.structured")


class MatrixKind(str, Enum):
    TOEPLITZ = "toeplitz"
    CIRCULANT = "circulant"


@dataclass(frozen=True)
class StructuredMatrix:
    """T_n(phi) or C_n(phi) with the symbol it came from"""

    kind: MatrixKind
    n: int
    block_size: int
    data: np.ndarray
    source: Symbol

    @property
    def shape(self):
        return self.data.shape

    def block(self, i: int, j: int) -> np.ndarray:
        """Block (i, j), zero-based"""
        N = self.block_size
        return self.data[i * N:(i + 1) * N, j * N:(j + 1) * N]

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "n": self.n, "block_size": self.block_size, "symbol": self.source.name}


def _check_size(s: Symbol, n: int, size_cap: Optional[int]) -> None:
    if n < 1:
        raise ValidationError(f"block count must be >= 1, got {n}")
    size_cap = get_config().linalg.size_cap if size_cap is None else size_cap
    rows = n * s.block_size
    if rows > size_cap:
        raise SizeCapExceededError(
            f"{rows} rows exceed the dense size cap {size_cap} (SZEGO_LAB_SIZE_CAP)",
            {"rows": rows, "size_cap": size_cap},
        )


def _empty(s: Symbol, n: int) -> np.ndarray:
    dtype = float if s.is_real() else complex
    return np.zeros((n * s.block_size, n * s.block_size), dtype=dtype)


def _as_dtype(block: np.ndarray, dtype) -> np.ndarray:
    return block.real if np.issubdtype(dtype, np.floating) else block


def build_toeplitz(s: Symbol, n: int, size_cap: Optional[int] = None) -> StructuredMatrix:
    """T_n(phi): block (i, j) = phi_{i-j}"""
    _check_size(s, n, size_cap)
    N = s.block_size
    data = _empty(s, n)
    for k, c in s.coefficients.items():
        if abs(k) >= n:
            continue
        c = _as_dtype(c, data.dtype)
        for i in range(max(0, k), min(n, n + k)):
            j = i - k
            data[i * N:(i + 1) * N, j * N:(j + 1) * N] = c
    logger.debug(f"built T_{n}({s.name})", extra={"symbol": s.name, "n": n, "kind": "toeplitz"})
    return StructuredMatrix(MatrixKind.TOEPLITZ, n, N, data, s)


def build_circulant(s: Symbol, n: int, size_cap: Optional[int] = None) -> StructuredMatrix:
    """
    C_n(phi): block (i, j) = phi_{i-j+n}, phi_{i-j} or phi_{i-j-n} depending on
    whether i-j lies below, inside or above [-n/2, n/2).
    """
    _check_size(s, n, size_cap)
    k_min, k_max = s.band
    if 2 * k_max >= n or -2 * k_min >= n:
        raise BandTooWideError(
            f"band [{k_min}, {k_max}] of {s.name} does not fit in (-n/2, n/2) for n={n}",
            {"band": [k_min, k_max], "n": n},
        )
    N = s.block_size
    data = _empty(s, n)
    for k, c in s.coefficients.items():
        if not np.any(c != 0):
            continue
        c = _as_dtype(c, data.dtype)
        for i in range(n):
            j = (i - k) % n
            data[i * N:(i + 1) * N, j * N:(j + 1) * N] = c
    logger.debug(f"built C_{n}({s.name})", extra={"symbol": s.name, "n": n, "kind": "circulant"})
    return StructuredMatrix(MatrixKind.CIRCULANT, n, N, data, s)
