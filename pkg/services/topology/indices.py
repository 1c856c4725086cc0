"""
Symmetry classes of symbols and the indices that count zero-mode pairs.

Class D    real antisymmetric T_n: phi(theta) = conj(phi(-theta)) = -phi(theta)^H
Class BDI  class D plus block anti-diagonal form [[0, B], [-B^T(-theta), 0]]
Class AIII hermitian phi with block anti-diagonal form [[0, B], [B^H, 0]]
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional

import numpy as np

from backend.config import get_config
from services.asymptotics import det_winding
from services.core.errors import GaplessSymbolError, PreconditionError
from services.structured import pfaffian
from services.symbols import Symbol, sample, sample_at, symbol_from_coefficients

logger = logging.getLogger("szego_lab.topology")

# grid used for the structural checks
CLASS_GRID = 64
# anti-diagonal search is exhaustive over balanced bipartitions up to this size
MAX_SEARCH_BLOCK = 16


class ClassTag(str, Enum):
    D = "D"
    BDI = "BDI"
    AIII = "AIII"
    UNCLASSIFIED = "unclassified"


@dataclass
class SymmetryClass:
    tag: ClassTag
    basis_permutation: Optional[List[int]] = None
    B_symbol: Optional[Symbol] = None

    @property
    def is_chiral(self) -> bool:
        return self.tag in (ClassTag.BDI, ClassTag.AIII)

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag.value, "basis_permutation": self.basis_permutation}


@dataclass
class IndexReport:
    cls: SymmetryClass
    I_D: Optional[int] = None
    I_winding: Optional[int] = None
    predicted_pairs: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class": self.cls.to_dict(),
            "I_D": self.I_D,
            "I_winding": self.I_winding,
            "predicted_pairs": self.predicted_pairs,
        }


def _antidiagonal_permutation(samples: np.ndarray, tol: float) -> Optional[List[int]]:
    """Balanced split X|Y of the internal index with phi[X, X] = phi[Y, Y] = 0 on every sample"""
    N = samples.shape[1]
    if N % 2 or N > MAX_SEARCH_BLOCK:
        return None
    pattern = np.max(np.abs(samples), axis=0) > tol
    if np.any(np.diag(pattern)):
        return None
    for rest in combinations(range(1, N), N // 2 - 1):
        X = [0, *rest]
        Y = [i for i in range(N) if i not in X]
        if not pattern[np.ix_(X, X)].any() and not pattern[np.ix_(Y, Y)].any():
            return X + Y
    return None


def _off_diagonal_block(s: Symbol, permutation: List[int]) -> Symbol:
    half = s.block_size // 2
    rows, cols = permutation[:half], permutation[half:]
    blocks = {k: c[np.ix_(rows, cols)] for k, c in s.coefficients.items()}
    B = symbol_from_coefficients(half, blocks, name=f"B[{s.name}]")
    if s.evaluator is None:
        return B

    def evaluator(thetas: np.ndarray) -> np.ndarray:
        return sample_at(s, thetas)[:, rows][:, :, cols]

    return Symbol(B.block_size, B.coefficients, s.tail_bound, B.name, evaluator)


def detect_class(s: Symbol, tol: Optional[float] = None) -> SymmetryClass:
    """Most constrained of BDI, D, AIII that the symbol satisfies on a grid"""
    tol = get_config().linalg.structure_tol if tol is None else tol
    samples = sample(s, CLASS_GRID).samples
    scale = max(1.0, float(np.max(np.abs(samples))))
    limit = tol * scale

    mirrored = samples[(-np.arange(CLASS_GRID)) % CLASS_GRID]
    adjoint = np.conj(np.swapaxes(samples, 1, 2))
    real_structure = float(np.max(np.abs(samples - np.conj(mirrored)))) <= limit
    antihermitian = float(np.max(np.abs(samples + adjoint))) <= limit
    hermitian = float(np.max(np.abs(samples - adjoint))) <= limit
    is_D = real_structure and antihermitian

    permutation = _antidiagonal_permutation(samples, limit) if (is_D or hermitian) else None

    if is_D and permutation is not None:
        tag = ClassTag.BDI
    elif is_D:
        tag = ClassTag.D
        permutation = None
    elif hermitian and permutation is not None:
        tag = ClassTag.AIII
    else:
        tag = ClassTag.UNCLASSIFIED
        permutation = None

    B = _off_diagonal_block(s, permutation) if permutation is not None else None
    logger.debug(f"{s.name} detected as class {tag.value}", extra={"symbol": s.name})
    return SymmetryClass(tag, permutation, B)


def kitaev_index(s: Symbol, cls: Optional[SymmetryClass] = None) -> int:
    """sign[Pf phi(1) Pf phi(-1)] in the coefficient basis"""
    cls = detect_class(s) if cls is None else cls
    if cls.tag not in (ClassTag.D, ClassTag.BDI):
        raise PreconditionError(f"Kitaev index needs class D, {s.name} is {cls.tag.value}", {"class": cls.tag.value})
    tol = get_config().linalg.structure_tol
    at_zero, at_pi = sample_at(s, np.array([0.0, np.pi]))
    pfaffians = []
    for theta, matrix in ((0.0, at_zero), (np.pi, at_pi)):
        value = pfaffian(matrix, tol=tol)
        scale = max(1.0, float(np.max(np.abs(matrix)))) ** (s.block_size // 2)
        if abs(value) <= 1e-12 * scale:
            raise GaplessSymbolError(
                f"phi({'1' if theta == 0.0 else '-1'}) is singular; the gap closes there",
                {"theta": theta, "pfaffian": value},
            )
        pfaffians.append(value)
    return 1 if pfaffians[0] * pfaffians[1] > 0 else -1


def winding_index(s: Symbol, cls: Optional[SymmetryClass] = None) -> int:
    """Winding of det B for chiral classes"""
    cls = detect_class(s) if cls is None else cls
    if cls.B_symbol is None:
        raise PreconditionError(
            f"winding index needs class BDI or AIII, {s.name} is {cls.tag.value}", {"class": cls.tag.value}
        )
    return det_winding(cls.B_symbol)


def predict_zero_modes(s: Symbol) -> IndexReport:
    cls = detect_class(s)
    if cls.is_chiral:
        winding = winding_index(s, cls)
        I_D = kitaev_index(s, cls) if cls.tag == ClassTag.BDI else None
        report = IndexReport(cls, I_D=I_D, I_winding=winding, predicted_pairs=abs(winding))
    elif cls.tag == ClassTag.D:
        I_D = kitaev_index(s, cls)
        report = IndexReport(cls, I_D=I_D, predicted_pairs=0 if I_D == 1 else 1)
    else:
        logger.warning(f"⚠️ {s.name} fits no known symmetry class; no zero-mode prediction", extra={"symbol": s.name})
        report = IndexReport(cls)
    logger.info(
        f"{s.name}: class {cls.tag.value}, predicted pairs {report.predicted_pairs}", extra={"symbol": s.name}
    )
    return report
