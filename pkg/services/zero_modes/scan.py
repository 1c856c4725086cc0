"""
Zero modes of T_n(phi): eigenvalues that fall off geometrically in n and have
no counterpart in the circulant (bulk) spectrum.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg as la
from scipy.spatial.distance import directed_hausdorff
from scipy.stats import linregress

from backend.config import get_config
from services.asymptotics import laurent_roots
from services.core.errors import (
    ConvergenceError,
    GaplessSymbolError,
    InsufficientDataError,
    PreconditionError,
    UnderflowError,
    ValidationError,
)
from services.structured import (
    build_toeplitz,
    circulant_log_det,
    circulant_spectrum,
    eigensystem,
    log_det,
    matrix_structure,
    solve,
)
from services.symbols import Symbol, decay_ratio, inverse_symbol, sample

logger = logging.getLogger("szego_lab.zero_modes")

# how many of the smallest |eps| are kept per n in the report
REPORTED_LEVELS = 8


@dataclass
class SpectrumRow:
    n: int
    epsilons: np.ndarray  # |eps| ascending
    gap: float
    candidate_pairs: int

    @property
    def threshold(self) -> float:
        return self.gap / 2


@dataclass
class ZeroModeReport:
    n_values: List[int]
    epsilons: List[List[float]]
    fitted_rate: Optional[float]
    pair_count: int
    wavefunction: Optional[np.ndarray] = None
    profile: Optional[List[float]] = None
    coeff_decay_rate: Optional[float] = None
    coeff_decay_ratios: Optional[Dict[str, float]] = None
    root_gap: Optional[float] = None
    gaps: List[float] = field(default_factory=list)
    det_ratio_trace: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def mode_count(self) -> int:
        return 2 * self.pair_count

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_values": self.n_values,
            "epsilons": self.epsilons,
            "fitted_rate": self.fitted_rate,
            "pair_count": self.pair_count,
            "mode_count": self.mode_count,
            "profile": self.profile,
            "coeff_decay_rate": self.coeff_decay_rate,
            "coeff_decay_ratios": self.coeff_decay_ratios,
            "root_gap": self.root_gap,
            "gap_circulant": self.gaps,
            "det_ratio_trace": [{"n": n, "log_abs_ratio": r} for n, r in self.det_ratio_trace],
        }


@dataclass
class PowerIterationResult:
    vector: np.ndarray
    residual: float
    eigenvalue: complex  # eigenvalue estimate of T_n
    energy: float  # real eps of the hermitian form
    is_zero_mode: bool
    gap: float
    seed_site: int
    component: int
    solves: int = 1


def circulant_gap(s: Symbol, n: int) -> float:
    """Smallest eigenvalue magnitude of phi over the circulant momenta 2 pi j / n"""
    return float(np.min(np.abs(circulant_spectrum(s, n))))


def _check_gapped(s: Symbol) -> None:
    samples = sample(s, get_config().series.grid_start).samples
    smallest = float(np.min(np.linalg.svd(samples, compute_uv=False)))
    scale = max(1.0, float(np.max(np.abs(samples))))
    if smallest <= 1e-13 * scale:
        raise GaplessSymbolError(
            f"{s.name} has a vanishing singular value on the circle", {"min_singular_value": smallest}
        )


def spectrum_row(s: Symbol, n: int) -> SpectrumRow:
    """|eps| of T_n, circulant gap and zero-mode candidate count for one n"""
    epsilons = np.sort(np.abs(eigensystem(build_toeplitz(s, n)).energies))
    gap = circulant_gap(s, n)
    below = int(np.count_nonzero(epsilons < gap / 2))
    return SpectrumRow(n, epsilons, gap, below // 2)


def _representative(epsilons: np.ndarray, pairs: int) -> float:
    """Geometric mean of the |eps| of the zero-mode pairs (one value per pair)"""
    values = epsilons[: 2 * pairs : 2]
    return float(np.exp(np.mean(np.log(values))))


def zero_mode_scan(
    s: Symbol,
    n_range: Optional[Iterable[int]] = None,
    rows: Optional[List[SpectrumRow]] = None,
) -> ZeroModeReport:
    """Count persistent zero-mode pairs over n_range and fit their decay"""
    settings = get_config().zero_modes
    if n_range is None:
        n_range = range(settings.n_min, settings.n_max + 1)
    n_values = sorted(set(int(n) for n in n_range))
    if len(n_values) < 2:
        raise InsufficientDataError("zero-mode scan needs at least two values of n", {"n_values": n_values})
    _check_gapped(s)

    if rows is None:
        rows = [spectrum_row(s, n) for n in n_values]
    rows = sorted(rows, key=lambda r: r.n)
    pair_count = min(r.candidate_pairs for r in rows)

    fitted_rate = None
    if pair_count > 0:
        last = rows[-1]
        if last.epsilons[0] < settings.eps_floor:
            raise UnderflowError(
                f"smallest eps {last.epsilons[0]:.2e} at n={last.n} is below {settings.eps_floor:.0e}; shrink the n range",
                {"n": last.n, "eps": float(last.epsilons[0])},
            )
        points = [(r.n, _representative(r.epsilons, pair_count)) for r in rows]
        points = [(n, e) for n, e in points if e > settings.fit_floor]
        if len(points) >= 2:
            fit = linregress([n for n, _ in points], np.log([e for _, e in points]))
            fitted_rate = float(fit.slope)

    report = ZeroModeReport(
        n_values=[r.n for r in rows],
        epsilons=[r.epsilons[:REPORTED_LEVELS].tolist() for r in rows],
        fitted_rate=fitted_rate,
        pair_count=pair_count,
        gaps=[r.gap for r in rows],
    )

    top = build_toeplitz(s, rows[-1].n)
    system = eigensystem(top)
    report.wavefunction = system.vectors[:, 0] / la.norm(system.vectors[:, 0])
    report.profile = site_profile(report.wavefunction, s.block_size)

    for r in rows:
        ratio = log_det(build_toeplitz(s, r.n)) / circulant_log_det(s, r.n)
        report.det_ratio_trace.append((r.n, ratio.log_abs))

    try:
        inverse = inverse_symbol(s)
        report.coeff_decay_rate = inverse_coefficient_decay(s, inverse=inverse)[0]
        report.coeff_decay_ratios = {"plus": decay_ratio(inverse, 1), "minus": decay_ratio(inverse, -1)}
    except (InsufficientDataError, ConvergenceError, GaplessSymbolError) as e:
        logger.debug(f"no coefficient decay for {s.name}: {e}", extra={"symbol": s.name})
    if s.evaluator is None:
        try:
            report.root_gap = root_analysis(s)[0][1]
        except (PreconditionError, GaplessSymbolError, ValidationError, IndexError) as e:
            logger.debug(f"no root analysis for {s.name}: {e}", extra={"symbol": s.name})

    logger.info(
        f"{s.name}: {pair_count} zero-mode pair(s), fitted rate {fitted_rate}", extra={"symbol": s.name}
    )
    return report


def site_profile(vector: np.ndarray, block_size: int) -> List[float]:
    """Norm of the vector on each block site"""
    return la.norm(np.asarray(vector).reshape(-1, block_size), axis=1).tolist()


def _ritz(T: np.ndarray, hermitian: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, float]:
    """Smallest-|lambda| Ritz pair of the hermitian form on span{v, T^-1 v}"""
    inverse_image = solve(T, v)
    w = inverse_image - np.vdot(v, inverse_image) * v
    if la.norm(w) <= 1e-12 * max(1.0, la.norm(inverse_image)):
        basis = v[:, None]
    else:
        basis = np.column_stack([v, w / la.norm(w)])
        basis, _ = la.qr(basis, mode="economic")
    projected = basis.conj().T @ hermitian @ basis
    values, vectors = la.eigh((projected + projected.conj().T) / 2)
    order = np.lexsort((-values, np.abs(values)))
    y = basis @ vectors[:, order[0]]
    return y / la.norm(y), float(values[order[0]])


def power_iteration_mode(
    s: Symbol,
    n: int,
    seed_site: Optional[int] = None,
    steps: int = 1,
) -> PowerIterationResult:
    """
    Zero-mode vector from T_n^{-1} applied to a unit vector at a bulk site.

    One real solve lands in the plane of a +-eps pair, where the plain
    Rayleigh quotient is zero; a Rayleigh-Ritz step of the hermitian form
    (i T for antisymmetric T) on span{v, T^-1 v} splits the pair and gives
    the eigenvalue estimate.

    ``steps`` solves are applied first. While the estimate sits inside the
    gap and the residual is above residual_tol * gap, further solves are
    applied (each one shrinks the bulk part by about eps / gap), up to
    max_solves in total.
    """
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    settings = get_config().zero_modes
    matrix = build_toeplitz(s, n)
    T = np.asarray(matrix.data, dtype=complex)
    N = s.block_size
    hermitian = 1j * T if matrix_structure(T) == "antisymmetric" else T
    gap = circulant_gap(s, n)
    target = settings.residual_tol * gap
    seed_site = n // 2 if seed_site is None else seed_site
    if not 0 <= seed_site < n:
        raise ValidationError(f"seed site {seed_site} outside 0..{n - 1}")

    # bulk sites ordered by distance from the requested seed
    sites = sorted(range(n), key=lambda i: (abs(i - seed_site), i))
    attempts = 0
    for site in sites:
        responses = []
        for component in range(N):
            e = np.zeros(n * N, dtype=complex)
            e[site * N + component] = 1.0
            responses.append((la.norm(solve(T, e)), component))
        order = sorted(responses, key=lambda r: -r[0])
        for _, component in order:
            attempts += 1
            v = np.zeros(n * N, dtype=complex)
            v[site * N + component] = 1.0
            solves = 0
            while True:
                v = solve(T, v)
                v /= la.norm(v)
                solves += 1
                if solves < steps:
                    continue
                y, energy = _ritz(T, hermitian, v)
                residual = float(la.norm(hermitian @ y - energy * y))
                is_zero_mode = abs(energy) < gap / 2
                if not is_zero_mode or residual <= target or solves >= max(steps, settings.max_solves):
                    break
            if not is_zero_mode or residual <= target:
                eigenvalue = -1j * energy if hermitian is not T else complex(energy)
                logger.debug(
                    f"power iteration on {s.name}: site {site}, component {component}, "
                    f"{solves} solve(s), residual {residual:.2e}",
                    extra={"symbol": s.name, "n": n},
                )
                return PowerIterationResult(
                    y, residual, eigenvalue, energy, is_zero_mode, gap, site, component, solves
                )
    raise ConvergenceError(
        f"no seed among {attempts} basis vectors reached the zero mode of T_{n}({s.name})", {"attempts": attempts}
    )


def inverse_coefficient_decay(
    s: Symbol, k_max: Optional[int] = None, inverse: Optional[Symbol] = None
) -> Tuple[float, np.ndarray]:
    """
    Slope of log |(phi^-1)_k| against |k| (both sides pooled), plus the same
    slope for every matrix entry (NaN where an entry has too few points).
    """
    inverse = inverse_symbol(s) if inverse is None else inverse
    indices = [abs(k) for k in inverse.coefficients if k != 0]
    if k_max is None:
        k_max = max(indices, default=0)
    ks = np.arange(1, k_max + 1)
    stacked = np.array([np.maximum(np.abs(inverse.coefficient(k)), np.abs(inverse.coefficient(-k))) for k in ks])
    if stacked.size == 0:
        raise InsufficientDataError(f"fewer than 4 usable coefficients of {s.name}^-1", {"usable": 0})

    largest = max(inverse.norm(), 1e-300)
    floor = max(10 * inverse.tail_bound, 1e-13 * largest)
    norms = stacked.reshape(len(ks), -1).max(axis=1)
    usable = norms > floor
    if np.count_nonzero(usable) < 4:
        raise InsufficientDataError(
            f"fewer than 4 usable coefficients of {s.name}^-1", {"usable": int(np.count_nonzero(usable))}
        )
    rate = float(linregress(ks[usable], np.log(norms[usable])).slope)

    N = s.block_size
    per_entry = np.full((N, N), np.nan)
    for a in range(N):
        for b in range(N):
            entry = stacked[:, a, b]
            mask = entry > floor
            if np.count_nonzero(mask) >= 4:
                per_entry[a, b] = linregress(ks[mask], np.log(entry[mask])).slope
    return rate, per_entry


def root_analysis(s: Symbol) -> List[Tuple[complex, float]]:
    """Roots of det phi(z) sorted by |log|z||; the first sets the zero-mode decay"""
    if s.evaluator is not None:
        raise PreconditionError(f"{s.name} is not banded; use inverse_coefficient_decay", {"symbol": s.name})
    k_min, k_max = s.band
    N = s.block_size
    lo, hi = N * k_min, N * k_max
    M = 1
    while M < 2 * (hi - lo + 1):
        M *= 2
    M = max(M, 64)
    dets = np.linalg.det(sample(s, M).samples)
    coeffs_all = np.fft.ifft(dets)
    coeffs = {k: complex(coeffs_all[k % M]) for k in range(lo, hi + 1)}
    largest = max(abs(c) for c in coeffs.values())
    if largest == 0.0:
        raise ValidationError(f"det {s.name} vanishes identically")
    coeffs = {k: c for k, c in coeffs.items() if abs(c) > 1e-12 * largest}
    k_lo, k_hi = min(coeffs), max(coeffs)
    coeffs = {k: coeffs.get(k, 0.0) for k in range(k_lo, k_hi + 1)}

    roots = laurent_roots(coeffs)
    result = sorted(((complex(r), abs(math.log(abs(r)))) for r in roots if r != 0), key=lambda rd: rd[1])
    if result and result[0][1] < 1e-8:
        raise GaplessSymbolError(f"det {s.name} has a root on the unit circle", {"root": str(result[0][0])})
    return result


def spectral_hausdorff_distance(s: Symbol, n: int, pair_count: int = 0) -> float:
    """Hausdorff distance between T_n's spectrum without its zero modes and C_n's spectrum"""
    toeplitz = eigensystem(build_toeplitz(s, n)).values[2 * pair_count:]
    bulk = circulant_spectrum(s, n)
    a = np.column_stack([toeplitz.real, toeplitz.imag])
    b = np.column_stack([bulk.real, bulk.imag])
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def det_ratio_bound(report: ZeroModeReport) -> float:
    """Spread of log|det T_n / det C_n| minus the zero-mode product over the scanned n"""
    if report.fitted_rate is None:
        values = [r for _, r in report.det_ratio_trace]
    else:
        values = [r - report.mode_count * n * report.fitted_rate for n, r in report.det_ratio_trace]
    return float(max(values) - min(values))
