"""
Szego-Widom asymptotics of block Toeplitz determinants.

det T_n(phi) ~ G(phi)^n E(phi). When E(phi) vanishes because of one pair of
zero modes, the decay is carried by the Fourier coefficients of phi^{-1} at
distance n, which is what modified_prefactor measures.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg as la
from scipy.stats import linregress

from backend.config import get_config
from services.core.errors import (
    ConvergenceError,
    GaplessSymbolError,
    InsufficientDataError,
    NonzeroWindingError,
    PreconditionError,
    UnresolvableCoefficientError,
    ValidationError,
)
from services.core.signed_log import SignedLogValue
from services.structured import build_toeplitz, log_det
from services.symbols import Symbol, det_on_grid, inverse_symbol

logger = logging.getLogger("szego_lab.asymptotics")

# determinants smaller than this are left out of the modified-asymptotics fit
DET_FLOOR_LOG = math.log(1e-280)


class EClass(str, Enum):
    NONZERO = "nonzero"
    ZERO = "zero"
    INCONCLUSIVE = "inconclusive"


@dataclass
class AsymptoticsReport:
    G: SignedLogValue
    winding_det: int = 0
    E_class: EClass = EClass.INCONCLUSIVE
    E_estimate: Optional[complex] = None
    ratio: float = float("nan")
    ratio_trace: List[Tuple[int, complex]] = field(default_factory=list)
    determinants: List[Tuple[int, SignedLogValue]] = field(default_factory=list)
    modified_prefactors: List[Tuple[int, SignedLogValue]] = field(default_factory=list)
    literal_prefactors: List[Tuple[int, SignedLogValue]] = field(default_factory=list)
    E_tilde_estimate: Optional[complex] = None
    t_trace: List[Tuple[int, complex]] = field(default_factory=list)
    max_deviation: Optional[float] = None
    prefactor_rate: Optional[float] = None

    @property
    def n_values(self) -> List[int]:
        return [n for n, _ in self.determinants]

    def to_dict(self) -> Dict[str, Any]:
        def pairs(rows):
            return [{"n": n, **value.to_dict()} for n, value in rows]

        def complex_rows(rows):
            return [{"n": n, "re": z.real, "im": z.imag} for n, z in rows]

        return {
            "G": self.G.to_dict(),
            "winding_det": self.winding_det,
            "E_class": self.E_class.value,
            "E_estimate": None if self.E_estimate is None else {"re": self.E_estimate.real, "im": self.E_estimate.imag},
            "ratio": self.ratio,
            "ratio_trace": complex_rows(self.ratio_trace),
            "determinants": pairs(self.determinants),
            "modified_prefactors": pairs(self.modified_prefactors),
            "literal_prefactors": pairs(self.literal_prefactors),
            "E_tilde_estimate": None
            if self.E_tilde_estimate is None
            else {"re": self.E_tilde_estimate.real, "im": self.E_tilde_estimate.imag},
            "t_trace": complex_rows(self.t_trace),
            "max_deviation": self.max_deviation,
            "prefactor_rate": self.prefactor_rate,
        }


@dataclass
class ModifiedAsymptotics:
    E_tilde: complex
    residuals: List[Tuple[int, complex]]
    max_deviation: float
    prefactor_rate: float
    prefactors: List[Tuple[int, SignedLogValue]] = field(default_factory=list)


# ============================================================================
# WINDING AND GEOMETRIC MEAN
# ============================================================================

def winding_number(f: Iterable[complex]) -> int:
    """Signed number of turns of a closed sampled curve around 0"""
    f = np.asarray(list(f) if not isinstance(f, np.ndarray) else f, dtype=complex)
    if f.size == 0:
        raise ValidationError("no samples")
    magnitudes = np.abs(f)
    if np.any(magnitudes <= 1e-13 * magnitudes.max()) or magnitudes.max() == 0:
        j = int(np.argmin(magnitudes))
        raise GaplessSymbolError(f"sample {j} vanishes; winding is undefined", {"index": j})

    steps = np.angle(np.roll(f, -1) / f)
    largest = float(np.max(np.abs(steps)))
    if largest >= np.pi / 2:
        raise ConvergenceError(
            f"phase step {largest:.3f} rad is too large for the grid", {"max_step": largest, "grid_size": f.size}
        )
    turns = float(np.sum(steps) / (2 * np.pi))
    w = int(round(turns))
    if abs(turns - w) >= 0.01:
        raise ConvergenceError(f"winding sum {turns:.4f} is not close to an integer", {"turns": turns})
    return w


def det_winding(s: Symbol) -> int:
    """Winding of det phi, refining the grid until the phase steps resolve"""
    settings = get_config().series
    M = settings.grid_start
    while True:
        try:
            return winding_number(det_on_grid(s, M))
        except ConvergenceError:
            if M >= settings.grid_max:
                raise
            M *= 2


def geometric_mean(s: Symbol, tol: Optional[float] = None) -> SignedLogValue:
    """
    G(phi) = exp( mean of log det phi over the circle ).

    Trapezoidal average on a doubling grid with a continuous branch of the
    argument; needs det phi nonvanishing with winding zero.
    """
    tol = get_config().asymptotics.mean_tol if tol is None else tol
    settings = get_config().series
    M = settings.grid_start
    previous: Optional[complex] = None
    while True:
        dets = det_on_grid(s, M)
        try:
            w = winding_number(dets)
        except ConvergenceError:
            w = None
        if w is not None and w != 0:
            raise NonzeroWindingError(
                f"det {s.name} winds {w} times around 0; log det has no continuous branch",
                {"winding": w, "symbol": s.name},
            )
        if w is not None:
            mean_log = complex(np.mean(np.log(np.abs(dets))), np.mean(np.unwrap(np.angle(dets))))
            if previous is not None and abs(mean_log - previous) < tol:
                return SignedLogValue.from_log(mean_log)
            previous = mean_log
        if M >= settings.grid_max:
            raise ConvergenceError(f"geometric mean of {s.name} did not settle", {"grid_size": M})
        M *= 2


# ============================================================================
# E CLASSIFICATION
# ============================================================================

def determinant_row(s: Symbol, n: int, G: SignedLogValue) -> Dict[str, Any]:
    """det T_n and det T_n / G^n for one n"""
    det = log_det(build_toeplitz(s, n))
    return {"n": n, "det": det, "ratio": det / G**n}


def _tail_ratio(rows: List[Tuple[int, SignedLogValue]]) -> Tuple[float, List[float]]:
    rates = []
    for (n1, e1), (n2, e2) in zip(rows, rows[1:]):
        if e1.is_zero or e2.is_zero:
            rates.append(0.0)
        else:
            rates.append(math.exp((e2.log_abs - e1.log_abs) / (n2 - n1)))
    tail = rates[-max(3, len(rates) // 2):]
    if any(r == 0.0 for r in tail):
        return 0.0, tail
    return math.exp(float(np.mean(np.log(tail)))), tail


def classify_E(
    s: Symbol,
    n_range: Iterable[int],
    G: Optional[SignedLogValue] = None,
    rows: Optional[List[Dict[str, Any]]] = None,
) -> AsymptoticsReport:
    """
    Decide from e_n = det T_n / G^n whether E(phi) is nonzero, zero or unclear.

    ``rows`` may carry precomputed determinant_row results (the CLI computes
    them concurrently).
    """
    settings = get_config().asymptotics
    n_values = sorted(set(int(n) for n in n_range))
    if len(n_values) < settings.min_points:
        raise InsufficientDataError(
            f"need at least {settings.min_points} values of n, got {len(n_values)}", {"n_values": n_values}
        )
    G = geometric_mean(s) if G is None else G
    if rows is None:
        rows = [determinant_row(s, n, G) for n in n_values]
    rows = sorted(rows, key=lambda r: r["n"])

    ratios = [(r["n"], r["ratio"]) for r in rows]
    rho, tail = _tail_ratio(ratios)
    tail_values = [e for _, e in ratios[-(len(tail) + 1):]]

    if rho == 0.0 or rho <= settings.zero_ratio:
        E_class = EClass.ZERO
    elif abs(rho - 1.0) <= settings.nonzero_band:
        last = tail_values[-1].value
        spread = max(abs(e.value - last) for e in tail_values) / abs(last)
        E_class = EClass.NONZERO if spread <= settings.cauchy_tol else EClass.INCONCLUSIVE
    else:
        E_class = EClass.INCONCLUSIVE

    report = AsymptoticsReport(
        G=G,
        E_class=E_class,
        E_estimate=ratios[-1][1].value if E_class == EClass.NONZERO else None,
        ratio=rho,
        ratio_trace=[(n, e.value) for n, e in ratios],
        determinants=[(r["n"], r["det"]) for r in rows],
    )
    logger.info(f"E({s.name}) classified {E_class.value} (tail ratio {rho:.6g})", extra={"symbol": s.name})
    return report


def widom_finite_E(s: Symbol, a: int, tol: Optional[float] = None) -> complex:
    """E(phi) = G(phi)^a det T_a(phi^{-1}) for symbols with phi_k = 0 beyond a on one side"""
    if a < 0:
        raise ValidationError(f"a must be nonnegative, got {a}")
    k_min, k_max = s.band
    if not (k_max <= a or -k_min <= a):
        raise PreconditionError(
            f"band [{k_min}, {k_max}] of {s.name} has coefficients beyond a={a} on both sides",
            {"band": [k_min, k_max], "a": a},
        )
    if a == 0:
        return 1.0 + 0.0j
    G = geometric_mean(s)
    inverse = inverse_symbol(s, tol)
    return (G**a * log_det(build_toeplitz(inverse, a))).value


# ============================================================================
# MODIFIED ASYMPTOTICS
# ============================================================================

def _converged_inverse(s: Symbol, inverse: Optional[Symbol]) -> Symbol:
    inverse = inverse_symbol(s) if inverse is None else inverse
    if inverse.tail_bound >= 1e-12:
        raise PreconditionError(
            f"inverse series of {s.name} has tail {inverse.tail_bound:.2e} >= 1e-12",
            {"tail_bound": inverse.tail_bound},
        )
    return inverse


def _resolved(inverse: Symbol, k: int) -> np.ndarray:
    coefficient = inverse.coefficient(k)
    magnitude = float(np.max(np.abs(coefficient)))
    if 0.0 < magnitude <= 10 * inverse.tail_bound:
        raise UnresolvableCoefficientError(
            f"(phi^-1)_{k} is at the truncation level ({magnitude:.2e})",
            {"k": k, "magnitude": magnitude, "tail_bound": inverse.tail_bound},
        )
    return coefficient


def modified_prefactor(s: Symbol, n: int, inverse: Optional[Symbol] = None) -> SignedLogValue:
    """
    Pair amplitude of the coefficients of phi^{-1} at distance n.

    Product of the largest singular values of (phi^-1)_n and (phi^-1)_{-n}.
    The plain determinant of (phi^-1)_n vanishes whenever that coefficient has
    rank below N, which is the case for every one-pair example here.
    """
    inverse = _converged_inverse(s, inverse)
    forward = _resolved(inverse, n)
    backward = _resolved(inverse, -n)
    sigma_forward = float(la.svdvals(forward)[0])
    sigma_backward = float(la.svdvals(backward)[0])
    if sigma_forward == 0.0 or sigma_backward == 0.0:
        return SignedLogValue.zero()
    return SignedLogValue(math.log(sigma_forward) + math.log(sigma_backward), 1.0)


def literal_prefactor(s: Symbol, n: int, inverse: Optional[Symbol] = None) -> SignedLogValue:
    """
    det of (phi^-1)_n itself.

    A coefficient whose smallest singular value sits at the series noise
    floor is rank deficient and gives an exact zero.
    """
    inverse = _converged_inverse(s, inverse)
    coefficient = inverse.coefficient(n)
    singular = la.svdvals(coefficient)
    floor = max(10 * inverse.tail_bound, 1e-13 * float(singular[0]))
    if float(singular[-1]) <= floor:
        return SignedLogValue.zero()
    return log_det(coefficient)


def _predicted_pairs(s: Symbol) -> Optional[int]:
    from services.topology import predict_zero_modes

    return predict_zero_modes(s).predicted_pairs


def verify_modified_asymptotics(
    s: Symbol,
    n_range: Iterable[int],
    classification: Optional[AsymptoticsReport] = None,
    predicted_pairs: Optional[int] = None,
) -> ModifiedAsymptotics:
    """t_n = det T_n / (G^n prefactor(n)) should settle to a nonzero constant"""
    report = classification if classification is not None else classify_E(s, n_range)
    if report.E_class != EClass.ZERO:
        raise PreconditionError(
            f"E({s.name}) is {report.E_class.value}; modified asymptotics needs E = 0",
            {"E_class": report.E_class.value},
        )
    pairs = _predicted_pairs(s) if predicted_pairs is None else predicted_pairs
    if pairs != 1:
        raise PreconditionError(
            f"modified asymptotics covers exactly one zero-mode pair, predicted {pairs}", {"predicted_pairs": pairs}
        )

    inverse = _converged_inverse(s, None)
    residuals: List[Tuple[int, complex]] = []
    prefactors: List[Tuple[int, SignedLogValue]] = []
    for n, det in report.determinants:
        if det.log_abs <= DET_FLOOR_LOG:
            continue
        prefactor = modified_prefactor(s, n, inverse)
        if prefactor.is_zero:
            raise PreconditionError(f"modified prefactor of {s.name} is exactly zero at n={n}", {"n": n})
        prefactors.append((n, prefactor))
        residuals.append((n, (det / (report.G**n * prefactor)).value))

    if len(residuals) < 2:
        raise InsufficientDataError("fewer than 2 usable determinants above the underflow floor")

    tail = residuals[-max(2, len(residuals) // 2):]
    E_tilde = complex(np.mean([t for _, t in tail]))
    deviation = max(abs(t - E_tilde) for _, t in tail) / abs(E_tilde)
    xs = np.array([n for n, _ in prefactors], dtype=float)
    ys = np.array([p.log_abs for _, p in prefactors])
    rate = float(linregress(xs, ys).slope)

    logger.info(
        f"modified asymptotics of {s.name}: E~ = {E_tilde:.6g}, tail deviation {deviation:.2e}",
        extra={"symbol": s.name},
    )
    return ModifiedAsymptotics(E_tilde, residuals, float(deviation), rate, prefactors)


def analyze_asymptotics(
    s: Symbol,
    n_range: Iterable[int],
    rows: Optional[List[Dict[str, Any]]] = None,
    predicted_pairs: Optional[int] = None,
) -> AsymptoticsReport:
    """Full report: G, winding, E class, prefactor sequence and E~ when it applies"""
    winding = det_winding(s)
    if winding != 0:
        raise NonzeroWindingError(f"det {s.name} has winding {winding}", {"winding": winding})
    report = classify_E(s, n_range, rows=rows)
    report.winding_det = winding

    try:
        inverse = _converged_inverse(s, None)
    except (PreconditionError, ConvergenceError) as e:
        logger.warning(f"⚠️ no prefactor sequence for {s.name}: {e}", extra={"symbol": s.name})
        return report

    for n in report.n_values:
        try:
            report.modified_prefactors.append((n, modified_prefactor(s, n, inverse)))
            report.literal_prefactors.append((n, literal_prefactor(s, n, inverse)))
        except UnresolvableCoefficientError:
            break

    if report.E_class == EClass.ZERO:
        pairs = _predicted_pairs(s) if predicted_pairs is None else predicted_pairs
        if pairs == 1:
            modified = verify_modified_asymptotics(s, n_range, report, pairs)
            report.E_tilde_estimate = modified.E_tilde
            report.t_trace = modified.residuals
            report.max_deviation = modified.max_deviation
            report.prefactor_rate = modified.prefactor_rate
        else:
            logger.info(f"{pairs} predicted pairs for {s.name}; no closed-form prefactor", extra={"symbol": s.name})
    return report
