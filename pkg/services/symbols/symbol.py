"""
Matrix-valued symbols on the unit circle.

Fourier convention used everywhere in the package::

    phi_k = (1/2pi) * integral phi(e^{i theta}) e^{i k theta} dtheta
    phi(e^{i theta}) = sum_k phi_k e^{-i k theta}

so block (i, j) of T_n(phi) is phi_{i-j}. Getting this sign wrong silently
flips every winding number downstream.
"""

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from backend.config import get_config
from services.core.errors import (
    ConvergenceError,
    DimensionMismatchError,
    DuplicateIndexError,
    SingularSampleError,
    SymbolFileError,
    ValidationError,
)

logger = logging.getLogger("szego_lab.symbols")

# angles -> (M, N, N) samples
Evaluator = Callable[[np.ndarray], np.ndarray]
CoefficientInput = Union[Mapping[int, Any], Iterable[Tuple[int, Any]]]


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=complex)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class Symbol:
    """Fourier coefficients of an N x N symbol, optionally with an exact evaluator"""

    block_size: int
    coefficients: Mapping[int, np.ndarray]
    tail_bound: float = 0.0
    name: str = "symbol"
    evaluator: Optional[Evaluator] = field(default=None, compare=False, repr=False)

    @property
    def band(self) -> Tuple[int, int]:
        nonzero = [k for k, c in self.coefficients.items() if np.any(c != 0)]
        return min(nonzero + [0]), max(nonzero + [0])

    @property
    def k_min(self) -> int:
        return self.band[0]

    @property
    def k_max(self) -> int:
        return self.band[1]

    @property
    def is_scalar(self) -> bool:
        return self.block_size == 1

    def coefficient(self, k: int) -> np.ndarray:
        if k in self.coefficients:
            return self.coefficients[k]
        return np.zeros((self.block_size, self.block_size), dtype=complex)

    def indices(self) -> List[int]:
        return sorted(self.coefficients)

    def is_real(self, tol: float = 0.0) -> bool:
        return all(np.max(np.abs(c.imag), initial=0.0) <= tol for c in self.coefficients.values())

    def norm(self) -> float:
        """Largest entry magnitude over all coefficients"""
        return max((float(np.max(np.abs(c), initial=0.0)) for c in self.coefficients.values()), default=0.0)


@dataclass
class SampledSymbol:
    block_size: int
    grid_size: int
    samples: np.ndarray  # (M, N, N)

    @property
    def thetas(self) -> np.ndarray:
        return grid_angles(self.grid_size)


def grid_angles(M: int) -> np.ndarray:
    return 2 * np.pi * np.arange(M) / M


def _is_power_of_two(M: int) -> bool:
    return M >= 1 and M & (M - 1) == 0


def _make_symbol(
    block_size: int,
    coefficients: Dict[int, np.ndarray],
    tail_bound: float = 0.0,
    name: str = "symbol",
    evaluator: Optional[Evaluator] = None,
) -> Symbol:
    coefficients = {int(k): _frozen(c) for k, c in coefficients.items()}
    if 0 not in coefficients:
        coefficients[0] = _frozen(np.zeros((block_size, block_size)))
    ordered = dict(sorted(coefficients.items()))
    return Symbol(block_size, MappingProxyType(ordered), float(tail_bound), name, evaluator)


def symbol_from_coefficients(N: int, coeffs: CoefficientInput, name: str = "symbol") -> Symbol:
    """Symbol holding exactly the given (k, N x N matrix) coefficients"""
    if N < 1:
        raise ValidationError(f"block size must be positive, got {N}")
    pairs = list(coeffs.items()) if isinstance(coeffs, Mapping) else list(coeffs)

    coefficients: Dict[int, np.ndarray] = {}
    for k, matrix in pairs:
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        if matrix.shape != (N, N):
            raise DimensionMismatchError(
                f"coefficient {k} has shape {matrix.shape}, expected {(N, N)}",
                {"k": int(k), "shape": list(matrix.shape), "block_size": N},
            )
        if int(k) in coefficients:
            raise DuplicateIndexError(f"duplicate coefficient index {k}", {"k": int(k)})
        coefficients[int(k)] = matrix
    return _make_symbol(N, coefficients, 0.0, name)


def scalar_symbol(coeffs: Mapping[int, complex], name: str = "scalar") -> Symbol:
    return symbol_from_coefficients(1, {k: [[c]] for k, c in coeffs.items()}, name)


def identity_symbol(N: int = 1) -> Symbol:
    return symbol_from_coefficients(N, {0: np.eye(N)}, "identity")


def evaluate_many(s: Symbol, thetas: np.ndarray) -> np.ndarray:
    """Coefficient sum at every angle, shape (len(thetas), N, N)"""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.zeros((thetas.size, s.block_size, s.block_size), dtype=complex)
    for k, c in s.coefficients.items():
        out += np.exp(-1j * k * thetas)[:, None, None] * c
    return out


def evaluate(s: Symbol, theta: float) -> np.ndarray:
    """phi(e^{i theta}) = sum_k phi_k e^{-i k theta}"""
    return evaluate_many(s, np.array([theta]))[0]


def _evaluate_on_grid(func: Evaluator, thetas: np.ndarray, N: int) -> np.ndarray:
    M = thetas.size
    try:
        values = np.asarray(func(thetas), dtype=complex)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != (M, N, N):
        # scalar-angle evaluator
        values = np.stack([np.asarray(func(t), dtype=complex).reshape(N, N) for t in thetas])
    return values


def sample_at(s: Symbol, thetas: np.ndarray) -> np.ndarray:
    """Symbol values at arbitrary angles, through the evaluator when there is one"""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if s.evaluator is not None:
        return _evaluate_on_grid(s.evaluator, thetas, s.block_size)
    return evaluate_many(s, thetas)


def sample(s: Symbol, M: int) -> SampledSymbol:
    """Values of the symbol on the uniform grid theta_j = 2 pi j / M"""
    if not _is_power_of_two(M):
        raise ValidationError(f"grid size must be a power of two, got {M}")
    thetas = grid_angles(M)
    if s.evaluator is not None:
        samples = _evaluate_on_grid(s.evaluator, thetas, s.block_size)
    elif M >= s.k_max - s.k_min + 1:
        # phi(theta_j) = sum_k phi_k e^{-2 pi i jk/M} is a forward FFT of the wrapped coefficients
        wrapped = np.zeros((M, s.block_size, s.block_size), dtype=complex)
        for k, c in s.coefficients.items():
            wrapped[k % M] += c
        samples = np.fft.fft(wrapped, axis=0)
    else:
        samples = evaluate_many(s, thetas)
    return SampledSymbol(s.block_size, M, samples)


def sample_to_series(
    func: Evaluator,
    N: int,
    tol: Optional[float] = None,
    name: str = "sampled",
    keep_evaluator: bool = True,
) -> Symbol:
    """
    Fourier coefficients of a smooth periodic evaluator.

    The grid doubles from the configured start until the outermost quarter of
    the coefficients is below ``tol``; that maximum becomes ``tail_bound``.
    Coefficients below tol/100 are pruned.
    """
    settings = get_config().series
    tol = settings.tol if tol is None else tol
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")

    M = settings.grid_start
    while True:
        samples = _evaluate_on_grid(func, grid_angles(M), N)
        if not np.all(np.isfinite(samples)):
            raise ConvergenceError("evaluator returned non-finite samples", {"grid_size": M})

        coeffs = np.fft.ifft(samples, axis=0)
        ks = np.rint(np.fft.fftfreq(M, d=1.0 / M)).astype(int)
        norms = np.max(np.abs(coeffs), axis=(1, 2))
        outer = np.abs(ks) >= (3 * M) // 8
        tail = float(norms[outer].max())
        if tail < tol:
            break
        if M >= settings.grid_max:
            raise ConvergenceError(
                f"Fourier tail {tail:.3e} above tolerance {tol:.1e} at M={M}; "
                "symbol is not smooth enough",
                {"grid_size": M, "tail": tail, "tol": tol},
            )
        M *= 2

    keep = (~outer) & (norms >= tol / 100)
    coefficients = {int(k): coeffs[j] for j, k in enumerate(ks) if keep[j]}
    logger.debug(
        f"series of {name}: M={M}, {len(coefficients)} coefficients, tail={tail:.2e}",
        extra={"symbol": name},
    )
    return _make_symbol(N, coefficients, tail, name, func if keep_evaluator else None)


def _inverse_evaluator(s: Symbol) -> Evaluator:
    def invert(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        values = sample_at(s, thetas)
        dets = np.linalg.det(values)
        scale = max(float(np.max(np.abs(values))), 1e-300) ** s.block_size
        bad = np.abs(dets) < 1e-13 * scale
        if np.any(bad):
            theta = float(thetas[np.argmax(bad)])
            raise SingularSampleError(
                f"det of {s.name} vanishes at theta={theta:.6g}; symbol is not invertible on the circle",
                {"theta": theta, "symbol": s.name},
            )
        return np.linalg.inv(values)

    return invert


def inverse_symbol(s: Symbol, tol: Optional[float] = None) -> Symbol:
    """Pointwise inverse, re-expanded in Fourier coefficients"""
    return sample_to_series(_inverse_evaluator(s), s.block_size, tol, name=f"{s.name}^-1")


def det_on_grid(s: Symbol, M: int) -> np.ndarray:
    """det phi(e^{i theta_j}) at the M uniform grid points"""
    return np.linalg.det(sample(s, M).samples)


def shift_symbol(s: Symbol, m: int) -> Symbol:
    """e^{-i m theta} phi: coefficient k moves to k + m"""
    evaluator = None
    if s.evaluator is not None:
        base = s.evaluator

        def evaluator(thetas):
            thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
            return np.exp(-1j * m * thetas)[:, None, None] * _evaluate_on_grid(base, thetas, s.block_size)

    shifted = {k + m: c for k, c in s.coefficients.items()}
    return _make_symbol(s.block_size, shifted, s.tail_bound, f"{s.name}*chi{m}", evaluator)


def reflect_symbol(s: Symbol) -> Symbol:
    """phi(e^{-i theta}): coefficient k moves to -k, T_n becomes its block transpose"""
    evaluator = None
    if s.evaluator is not None:
        base = s.evaluator

        def evaluator(thetas):
            thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
            return _evaluate_on_grid(base, -thetas, s.block_size)

    reflected = {-k: c for k, c in s.coefficients.items()}
    return _make_symbol(s.block_size, reflected, s.tail_bound, f"{s.name}~", evaluator)


def scalar_coefficients(s: Symbol) -> Dict[int, complex]:
    if not s.is_scalar:
        raise DimensionMismatchError(f"{s.name} is not scalar (N={s.block_size})")
    return {k: complex(c[0, 0]) for k, c in s.coefficients.items()}


# ============================================================================
# JSON FORM
# ============================================================================

def symbol_to_dict(s: Symbol) -> Dict[str, Any]:
    return {
        "block_size": s.block_size,
        "coefficients": [
            {"k": k, "re": c.real.tolist(), "im": c.imag.tolist()}
            for k, c in s.coefficients.items()
            if np.any(c != 0) or k == 0
        ],
    }


def symbol_from_dict(data: Mapping[str, Any], name: str = "file") -> Symbol:
    try:
        N = int(data["block_size"])
        pairs = []
        for entry in data["coefficients"]:
            real = np.asarray(entry["re"], dtype=float)
            imag = np.asarray(entry.get("im", np.zeros_like(real)), dtype=float)
            if real.shape != imag.shape:
                raise DimensionMismatchError(f"re/im shapes differ for k={entry['k']}")
            pairs.append((int(entry["k"]), real + 1j * imag))
    except (KeyError, TypeError, ValueError) as e:
        raise SymbolFileError(f"malformed symbol JSON: {e}") from e
    return symbol_from_coefficients(N, pairs, name)


def decay_ratio(s: Symbol, side: int = 1, k_start: int = 1) -> float:
    """Geometric ratio of coefficient norms along one side (side=+1 or -1)"""
    ks = sorted(k for k in s.coefficients if side * k >= k_start)
    norms = [float(np.max(np.abs(s.coefficients[k]))) for k in ks]
    usable = [(k, v) for k, v in zip(ks, norms) if v > max(s.tail_bound, 1e-300) * 10]
    if len(usable) < 2:
        return 0.0
    x = np.array([abs(k) for k, _ in usable], dtype=float)
    y = np.log([v for _, v in usable])
    slope = np.polyfit(x, y, 1)[0]
    return math.exp(slope)
