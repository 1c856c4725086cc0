"""
Sign-tracked determinants, Pfaffians, solves and spectra of dense matrices
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg as la

from backend.config import get_config
from services.core.errors import (
    AsymmetryError,
    DimensionMismatchError,
    SingularMatrixError,
    StructureError,
)
from services.core.signed_log import SignedLogValue
from services.symbols import Symbol, sample_at

from .matrices import StructuredMatrix

logger = logging.getLogger("szego_lab.structured")

MatrixLike = Union[StructuredMatrix, np.ndarray]

# pivots below this are an exact zero for log_det
ZERO_PIVOT = 1e-300


def as_array(m: MatrixLike) -> np.ndarray:
    if isinstance(m, StructuredMatrix):
        return m.data
    return np.asarray(m)


def _square(m: MatrixLike) -> np.ndarray:
    a = as_array(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def _lu(a: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", la.LinAlgWarning)
        return la.lu_factor(a)


def log_det(m: MatrixLike) -> SignedLogValue:
    """LU with partial pivoting; the permutation sign rides in the phase"""
    a = _square(m)
    if a.shape[0] == 0:
        return SignedLogValue.one()
    lu, piv = _lu(a)
    diag = np.diag(lu)
    magnitudes = np.abs(diag)
    if np.any(magnitudes < ZERO_PIVOT):
        return SignedLogValue.zero()
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    phase = np.prod(diag / magnitudes) * (-1.0) ** swaps
    return SignedLogValue(float(np.sum(np.log(magnitudes))), complex(phase))


def _check_real_antisymmetric(a: np.ndarray, tol: float) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag), initial=0.0) > tol * scale:
            raise AsymmetryError("matrix has a non-negligible imaginary part")
        a = a.real
    asym = float(np.max(np.abs(a + a.T), initial=0.0))
    if asym > tol * scale:
        raise AsymmetryError(f"matrix is not antisymmetric (|A + A^T| = {asym:.2e})", {"asymmetry": asym})
    return np.array(a, dtype=float)


def pfaffian(m: MatrixLike, tol: float = 1e-12) -> float:
    """
    Pfaffian of a real antisymmetric matrix by Parlett-Reid elimination.

    Convention: Pf([[0, a], [-a, 0]]) = a. Odd dimension gives 0.
    """
    A = _check_real_antisymmetric(_square(m), tol)
    n = A.shape[0]
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0

    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(A[k + 1:, k]).argmax())
        if kp != k + 1:
            A[[k + 1, kp], k:] = A[[kp, k + 1], k:]
            A[k:, [k + 1, kp]] = A[k:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            A[k + 2:, k + 2:] += np.outer(tau, A[k + 2:, k + 1])
            A[k + 2:, k + 2:] -= np.outer(A[k + 2:, k + 1], tau)
    return float(pf)


def solve(m: MatrixLike, b: np.ndarray, pivot_tol: Optional[float] = None) -> np.ndarray:
    """x with m x = b; refuses matrices singular to within the pivot tolerance"""
    a = _square(m)
    pivot_tol = get_config().linalg.pivot_tol if pivot_tol is None else pivot_tol
    b = np.asarray(b)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatchError(f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}")

    lu, piv = _lu(a)
    pivots = np.abs(np.diag(lu))
    largest = float(pivots.max()) if pivots.size else 0.0
    if pivots.size and (largest == 0.0 or float(pivots.min()) <= pivot_tol * largest):
        raise SingularMatrixError(
            "matrix is singular within pivot tolerance",
            {"min_pivot": float(pivots.min()), "max_pivot": largest, "pivot_tol": pivot_tol},
        )
    return la.lu_solve((lu, piv), b)


@dataclass
class Eigensystem:
    """Eigenpairs sorted by |energy| ascending"""

    structure: str  # "antisymmetric" or "hermitian"
    energies: np.ndarray  # real epsilon
    values: np.ndarray  # eigenvalues of m itself
    vectors: np.ndarray  # columns

    @property
    def hermitian_form(self) -> complex:
        """Factor c with c*m hermitian and c*m v = energy v"""
        return 1j if self.structure == "antisymmetric" else 1.0


def matrix_structure(a: np.ndarray, tol: Optional[float] = None) -> str:
    tol = get_config().linalg.structure_tol if tol is None else tol
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    imag = float(np.max(np.abs(a.imag), initial=0.0)) if np.iscomplexobj(a) else 0.0
    if imag <= tol * scale and float(np.max(np.abs(a.real + a.real.T), initial=0.0)) <= tol * scale:
        return "antisymmetric"
    if float(np.max(np.abs(a - a.conj().T), initial=0.0)) <= tol * scale:
        return "hermitian"
    raise StructureError("matrix is neither real antisymmetric nor hermitian within tolerance")


def eigensystem(m: MatrixLike, tol: Optional[float] = None) -> Eigensystem:
    a = _square(m)
    structure = matrix_structure(a, tol)
    if structure == "antisymmetric":
        # i*m is hermitian; m v = -i eps v
        energies, vectors = la.eigh(1j * np.real(a))
        values = -1j * energies
    else:
        energies, vectors = la.eigh((a + a.conj().T) / 2)
        values = energies.astype(float)
    order = np.lexsort((energies, np.abs(energies)))
    return Eigensystem(structure, energies[order], values[order], vectors[:, order])


def spectrum(m: MatrixLike, tol: Optional[float] = None) -> np.ndarray:
    """Eigenvalues sorted by |epsilon| ascending: +-i*eps for antisymmetric, real for hermitian"""
    return eigensystem(m, tol).values


def _momentum_samples(s: Symbol, n: int) -> np.ndarray:
    return sample_at(s, 2 * np.pi * np.arange(n) / n)


def circulant_log_det(s: Symbol, n: int) -> SignedLogValue:
    """prod_j det phi(2 pi j/n); equals det C_n for banded symbols"""
    signs, logs = np.linalg.slogdet(_momentum_samples(s, n))
    if np.any(signs == 0):
        return SignedLogValue.zero()
    return SignedLogValue(float(np.sum(logs)), complex(np.prod(signs)))


def circulant_spectrum(s: Symbol, n: int) -> np.ndarray:
    """Eigenvalues of phi at the circulant momenta, sorted by magnitude"""
    values = np.linalg.eigvals(_momentum_samples(s, n)).ravel()
    return values[np.argsort(np.abs(values), kind="stable")]
