"""
Scalar Wiener-Hopf factorization and Toeplitz determinants of symbols with winding.

Factor labels follow analyticity in z = e^{i theta}: phi_plus is analytic
(with analytic inverse) inside the unit disk, so its coefficients sit at
k <= 0; phi_minus is analytic outside and monic at infinity, coefficients at
k >= 0. A Laurent polynomial p then splits as

    p = e^{i w theta} * phi_minus * phi_plus

with w the winding of p, and alpha = phi_minus / phi_plus.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np

from services.core.errors import (
    GaplessSymbolError,
    NonzeroWindingError,
    ValidationError,
)
from services.core.signed_log import SignedLogValue
from services.structured import build_toeplitz, log_det, solve
from services.symbols import (
    Symbol,
    reflect_symbol,
    sample_to_series,
    scalar_coefficients,
    scalar_symbol,
    shift_symbol,
)

logger = logging.getLogger("szego_lab.asymptotics")

ScalarInput = Union[Symbol, Mapping[int, complex]]

# roots closer than this to |z| = 1 make the factorization meaningless
ROOT_CIRCLE_GAP = 1e-8


def _laurent_values(coeffs: Mapping[int, complex], thetas: np.ndarray) -> np.ndarray:
    values = np.zeros(thetas.shape, dtype=complex)
    for k, c in coeffs.items():
        values += c * np.exp(-1j * k * thetas)
    return values


@dataclass
class ScalarFactorization:
    phi_plus: Dict[int, complex]
    phi_minus: Dict[int, complex]
    alpha: Symbol
    winding: int
    roots_inside: List[complex]
    roots_outside: List[complex]

    def plus_values(self, thetas: np.ndarray) -> np.ndarray:
        return _laurent_values(self.phi_plus, np.asarray(thetas, dtype=float))

    def minus_values(self, thetas: np.ndarray) -> np.ndarray:
        return _laurent_values(self.phi_minus, np.asarray(thetas, dtype=float))

    def reconstruct(self, thetas: np.ndarray) -> np.ndarray:
        """e^{i w theta} phi_minus phi_plus"""
        thetas = np.asarray(thetas, dtype=float)
        return np.exp(1j * self.winding * thetas) * self.minus_values(thetas) * self.plus_values(thetas)

    def to_dict(self) -> Dict[str, Any]:
        def laurent(coeffs):
            return [{"k": k, "re": c.real, "im": c.imag} for k, c in sorted(coeffs.items())]

        return {
            "winding": self.winding,
            "phi_plus": laurent(self.phi_plus),
            "phi_minus": laurent(self.phi_minus),
            "alpha": laurent(scalar_coefficients(self.alpha)),
            "alpha_tail_bound": self.alpha.tail_bound,
            "roots_inside": [{"re": r.real, "im": r.imag} for r in self.roots_inside],
            "roots_outside": [{"re": r.real, "im": r.imag} for r in self.roots_outside],
        }


def _scalar_input(p: ScalarInput) -> Dict[int, complex]:
    coeffs = scalar_coefficients(p) if isinstance(p, Symbol) else {int(k): complex(c) for k, c in p.items()}
    largest = max((abs(c) for c in coeffs.values()), default=0.0)
    if largest == 0.0:
        raise ValidationError("zero polynomial has no factorization")
    return {k: c for k, c in coeffs.items() if abs(c) > 1e-15 * largest}


def _as_symbol(p: ScalarInput) -> Symbol:
    return p if isinstance(p, Symbol) else scalar_symbol(p)


def _ascending_product(factors: List[np.ndarray]) -> np.ndarray:
    out = np.array([1.0 + 0.0j])
    for factor in factors:
        out = np.convolve(out, factor)
    return out


def laurent_roots(coeffs: Mapping[int, complex]) -> np.ndarray:
    """Roots of z^{k_max} p(z) for p(z) = sum_k p_k z^{-k}, from the companion matrix"""
    k_min, k_max = min(coeffs), max(coeffs)
    # z^{k_max} p(z) = sum_k p_k z^{k_max - k}; highest power comes from k_min
    descending = [coeffs.get(k, 0.0) for k in range(k_min, k_max + 1)]
    if len(descending) < 2:
        return np.array([], dtype=complex)
    return np.roots(descending).astype(complex)


def wiener_hopf_scalar(p: ScalarInput, tol: Optional[float] = None) -> ScalarFactorization:
    """Split a scalar Laurent polynomial by the roots of z^{k_max} p(z)"""
    coeffs = _scalar_input(p)
    k_min, k_max = min(coeffs), max(coeffs)
    roots = laurent_roots(coeffs)

    if roots.size:
        gap = float(np.min(np.abs(np.abs(roots) - 1.0)))
        if gap < ROOT_CIRCLE_GAP:
            raise GaplessSymbolError(
                f"root within {gap:.1e} of the unit circle; symbol vanishes on the circle", {"min_gap": gap}
            )

    inside = sorted((r for r in roots if abs(r) < 1), key=abs)
    outside = sorted((r for r in roots if abs(r) > 1), key=abs)
    winding = len(inside) - k_max

    # phi_minus = prod (1 - r e^{-i theta}), coefficient j at k = j
    minus = _ascending_product([np.array([1.0, -r]) for r in inside])
    phi_minus = {j: complex(c) for j, c in enumerate(minus)}
    # phi_plus = lead * prod(-R) * prod (1 - e^{i theta}/R), coefficient j at k = -j
    constant = coeffs[k_min] * np.prod([-R for R in outside]) if outside else coeffs[k_min]
    plus = constant * _ascending_product([np.array([1.0, -1.0 / R]) for R in outside])
    phi_plus = {-j: complex(c) for j, c in enumerate(plus)}

    def alpha_evaluator(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        ratio = _laurent_values(phi_minus, thetas) / _laurent_values(phi_plus, thetas)
        return ratio.reshape(-1, 1, 1)

    alpha = sample_to_series(alpha_evaluator, 1, tol, name="alpha")
    logger.debug(
        f"Wiener-Hopf split: {len(inside)} roots inside, {len(outside)} outside, winding {winding}",
        extra={"symbol": "scalar"},
    )
    return ScalarFactorization(phi_plus, phi_minus, alpha, winding, inside, outside)


def winding_theorem_log(p: ScalarInput, m: int, n: int, method: str = "asymptotic") -> SignedLogValue:
    """
    det T_n(e^{-i m theta} p) for p with winding zero, as a SignedLogValue.

    method="asymptotic": (-1)^{nm} det T_{n+m}(p) det T_m(e^{-i n theta} alpha)
    method="exact": same with the second factor replaced by the top-right m x m
    corner of T_{n+m}(p)^{-1} (complementary minor), exact for every n.
    Negative m goes through the reflected symbol.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if method not in ("asymptotic", "exact"):
        raise ValidationError(f"unknown method {method!r}")
    s = _as_symbol(p)
    factorization = wiener_hopf_scalar(s)
    if factorization.winding != 0:
        raise NonzeroWindingError(
            f"p has winding {factorization.winding}; factor it out into m", {"winding": factorization.winding}
        )
    if m == 0:
        return log_det(build_toeplitz(s, n))
    if m < 0:
        s, m = reflect_symbol(s), -m
        factorization = wiener_hopf_scalar(s)

    big = build_toeplitz(s, n + m)
    base = log_det(big)
    if method == "exact":
        columns = np.eye(n + m, dtype=complex)[:, n:n + m]
        corner = solve(big, columns)[:m, :]
        second = log_det(corner)
    else:
        second = log_det(build_toeplitz(shift_symbol(factorization.alpha, n), m))
    sign = -1.0 if (n * m) % 2 else 1.0
    return base * second * sign


def scalar_winding_theorem(p: ScalarInput, m: int, n: int, method: str = "asymptotic") -> complex:
    """det T_n(e^{-i m theta} p) through the winding-zero factor p"""
    return winding_theorem_log(p, m, n, method).value


def brute_force_winding_det(p: ScalarInput, m: int, n: int) -> SignedLogValue:
    """Direct det T_n(e^{-i m theta} p)"""
    return log_det(build_toeplitz(shift_symbol(_as_symbol(p), m), n))
