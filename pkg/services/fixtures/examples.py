"""
Exactly solvable example symbols with closed-form oracles.

example1   BDI chain, phi = [[0, 1 - u t], [-1 + u z, 0]]
example1b  same with next-nearest hopping, t -> t^2 and z -> z^2
example2   class D, rational symbol entered through its evaluator
example3   AIII, phi = [[0, 1 + conj(zeta) t], [1 + zeta z, 0]]

with z = e^{i theta}, t = e^{-i theta}. A power z^j is the Fourier
coefficient at k = -j.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from services.core.errors import (
    FixtureParameterError,
    GaplessSymbolError,
    MissingFactorizationError,
    ValidationError,
)
from services.core.signed_log import SignedLogValue
from services.symbols import (
    Symbol,
    grid_angles,
    sample,
    sample_to_series,
    scalar_symbol,
    symbol_from_coefficients,
)

logger = logging.getLogger("szego_lab.fixtures")

FIXTURE_NAMES = ("example1", "example1b", "example2", "example3")

# forbidden-coefficient tail allowed by the analyticity checks
SUPPORT_TOL = 1e-8
# parameters closer than this to a gap closing are rejected
GAP_TOL = 1e-12

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Factor:
    """One factor of a block factorization; support is plus, minus, constant or monomial"""

    label: str
    evaluator: Evaluator
    support: str


@dataclass(frozen=True)
class ExampleFixture:
    name: str
    parameters: Mapping[str, complex]
    symbol: Symbol
    oracle_det: Callable[[int], SignedLogValue]
    oracle_G: float
    oracle_indices: Mapping[str, Any]
    factorization: Optional[Tuple[Factor, ...]] = None
    scalar_split: Optional[Tuple[Symbol, Symbol]] = None

    @property
    def label(self) -> str:
        params = ",".join(f"{k}={_format_param(v)}" for k, v in sorted(self.parameters.items()))
        return f"{self.name}({params})"


@dataclass
class SupportCheck:
    label: str
    support: str
    tail: float
    inverse_tail: float

    @property
    def ok(self) -> bool:
        return self.tail < SUPPORT_TOL and self.inverse_tail < SUPPORT_TOL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "support": self.support,
            "tail": self.tail,
            "inverse_tail": self.inverse_tail,
            "ok": self.ok,
        }


@dataclass
class FactorizationCheck:
    fixture: str
    grid_size: int
    max_residual: float
    supports: List[SupportCheck] = field(default_factory=list)

    @property
    def supports_ok(self) -> bool:
        return all(s.ok for s in self.supports)

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_residual < tol and self.supports_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixture": self.fixture,
            "grid_size": self.grid_size,
            "max_residual": self.max_residual,
            "supports_ok": self.supports_ok,
            "supports": [s.to_dict() for s in self.supports],
        }


def _format_param(value: complex) -> str:
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    return str(value).strip("()")


def _thetas(thetas: np.ndarray) -> np.ndarray:
    return np.atleast_1d(np.asarray(thetas, dtype=float))


def _blocks(a, b, c, d) -> np.ndarray:
    """Stack four broadcastable entry arrays into (M, 2, 2)"""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (a, b, c, d)))
    return np.stack([np.stack([a, b], axis=-1), np.stack([c, d], axis=-1)], axis=-2)


# ============================================================================
# PARAMETERS
# ============================================================================

def _real_param(parameters: Mapping[str, Any], key: str, name: str) -> float:
    if key not in parameters:
        raise FixtureParameterError(f"{name} needs parameter {key}", {"fixture": name, "missing": key})
    value = complex(parameters[key])
    if abs(value.imag) > 0:
        raise FixtureParameterError(f"{name}: {key} must be real, got {value}", {"fixture": name, key: str(value)})
    return value.real


def _check_unknown(parameters: Mapping[str, Any], allowed: Tuple[str, ...], name: str) -> None:
    unknown = sorted(set(parameters) - set(allowed))
    if unknown:
        raise FixtureParameterError(f"{name} takes {', '.join(allowed)}; unknown {', '.join(unknown)}", {"fixture": name})


def _chain_u(parameters: Mapping[str, Any], name: str) -> float:
    _check_unknown(parameters, ("u",), name)
    u = _real_param(parameters, "u", name)
    if abs(abs(u) - 1.0) < GAP_TOL:
        raise GaplessSymbolError(f"{name}: requires u not in {{-1, 1}}, got u={u}", {"fixture": name, "u": u})
    return u


def _example2_uv(parameters: Mapping[str, Any]) -> Tuple[float, float]:
    _check_unknown(parameters, ("u", "v"), "example2")
    u = _real_param(parameters, "u", "example2")
    v = _real_param(parameters, "v", "example2")
    if u <= 0 or v <= 0:
        raise FixtureParameterError(f"example2: requires u > 0 and v > 0, got u={u}, v={v}", {"u": u, "v": v})
    if u * v >= 1:
        raise FixtureParameterError(f"example2: requires u*v < 1, got u*v={u * v}", {"u": u, "v": v})
    if abs(u - v) < GAP_TOL:
        raise GaplessSymbolError(f"example2: requires u != v (gap closes at u = v = {u})", {"u": u, "v": v})
    return u, v


def _example3_zeta(parameters: Mapping[str, Any]) -> complex:
    _check_unknown(parameters, ("zeta",), "example3")
    if "zeta" not in parameters:
        raise FixtureParameterError("example3 needs parameter zeta", {"fixture": "example3", "missing": "zeta"})
    zeta = complex(parameters["zeta"])
    if abs(abs(zeta) - 1.0) < GAP_TOL:
        raise GaplessSymbolError(f"example3: requires |zeta| != 1, got |zeta|={abs(zeta)}", {"zeta": str(zeta)})
    return zeta


# ============================================================================
# EXAMPLE 1 / 1b
# ============================================================================

def _chain_symbol(u: float, hop: int, name: str) -> Symbol:
    return symbol_from_coefficients(
        2,
        {
            0: [[0, 1], [-1, 0]],
            hop: [[0, -u], [0, 0]],
            -hop: [[0, 0], [u, 0]],
        },
        name=name,
    )


def example1_split(u: float) -> Tuple[Symbol, Symbol]:
    """Scalar split of example1: det T_n(phi) = (-1)^n det T_n(lambda) det T_n(psi)"""
    lam = scalar_symbol({0: 1.0, 1: -u}, name="lambda")
    psi = scalar_symbol({0: -1.0, -1: u}, name="psi")
    return lam, psi


def _chain_indices(u: float, hop: int) -> Dict[str, Any]:
    winding = -hop if abs(u) > 1 else 0
    # Pf phi(1) Pf phi(-1) = (1 - u)(1 - (-1)^hop u)
    I_D = 1 if (1 - u) * (1 - (-1) ** hop * u) > 0 else -1
    return {"class": "BDI", "I_D": I_D, "I_winding": winding, "predicted_pairs": abs(winding)}


def _example1b_factors(u: float) -> Tuple[Factor, ...]:
    def p1(thetas):
        t = np.exp(-1j * _thetas(thetas))
        return _blocks(1.0, 0.0, 0.0, 1 - t**2 / u)

    def p2(thetas):
        n = _thetas(thetas).size
        return _blocks(np.zeros(n), u, u, 0.0)

    def p3(thetas):
        z = np.exp(1j * _thetas(thetas))
        return _blocks(z**2, 0.0, 0.0, z**-2)

    def p4(thetas):
        z = np.exp(1j * _thetas(thetas))
        return _blocks(1.0, 0.0, 0.0, -1 + z**2 / u)

    return (
        Factor("P1", p1, "minus"),
        Factor("P2", p2, "constant"),
        Factor("P3", p3, "monomial"),
        Factor("P4", p4, "plus"),
    )


def _make_example1(parameters: Mapping[str, Any]) -> ExampleFixture:
    u = _chain_u(parameters, "example1")
    return ExampleFixture(
        name="example1",
        parameters={"u": u},
        symbol=_chain_symbol(u, 1, f"example1(u={u})"),
        oracle_det=lambda n: SignedLogValue.one(),
        oracle_G=max(1.0, u * u),
        oracle_indices=_chain_indices(u, 1),
        scalar_split=example1_split(u),
    )


def _make_example1b(parameters: Mapping[str, Any]) -> ExampleFixture:
    u = _chain_u(parameters, "example1b")
    return ExampleFixture(
        name="example1b",
        parameters={"u": u},
        symbol=_chain_symbol(u, 2, f"example1b(u={u})"),
        oracle_det=lambda n: SignedLogValue.one(),
        oracle_G=max(1.0, u * u),
        oracle_indices=_chain_indices(u, 2),
        # P1 and P4 have analytic inverses only for |u| > 1
        factorization=_example1b_factors(u) if abs(u) > 1 else None,
    )


# ============================================================================
# EXAMPLE 2
# ============================================================================

def _example2_constants(u: float, v: float) -> Tuple[float, float, float]:
    a = (v + 1 / v) / 2
    b = (u + 1 / u) / 2
    c = (u * v + 1 / (u * v)) / 2
    return a, b, c


def example2_evaluator(u: float, v: float) -> Evaluator:
    """
    phi(theta) = [[i sin, a - b e^{-i theta}], [-a + b e^{i theta}, i sin]] / (c - cos)

    No parameter checks: u = v gives a symbol whose determinant touches zero.
    """
    a, b, c = _example2_constants(u, v)

    def evaluator(thetas: np.ndarray) -> np.ndarray:
        thetas = _thetas(thetas)
        scale = 1.0 / (c - np.cos(thetas))
        i_sin = 1j * np.sin(thetas)
        return scale[:, None, None] * _blocks(
            i_sin, a - b * np.exp(-1j * thetas), -a + b * np.exp(1j * thetas), i_sin
        )

    return evaluator


def _example2_symbol(u: float, v: float, tol: Optional[float] = None) -> Symbol:
    evaluator = example2_evaluator(u, v)
    name = f"example2(u={u},v={v})"
    series = sample_to_series(evaluator, 2, tol, name=name)
    # coefficients are real; drop the FFT round-off in the imaginary part
    real = symbol_from_coefficients(2, {k: c.real for k, c in series.coefficients.items()}, name=name)
    return dataclasses.replace(real, tail_bound=series.tail_bound, evaluator=evaluator)


def _example2_factors(u: float, v: float) -> Tuple[Factor, ...]:
    def minus_phi_plus(thetas):
        z = np.exp(1j * _thetas(thetas))
        prefactor = 2 * v * u / (1 - u * v * z)
        block = _blocks(
            (z**2 - 1) / 2,
            np.full(z.shape, 1 / (2 * u * v)),
            z**2 * (1 / u + u) / 2 - z * (1 / v + v) / 2,
            np.full(z.shape, 1 / (2 * u * u * v)),
        )
        return prefactor[:, None, None] * block

    def diagonal(thetas):
        z = np.exp(1j * _thetas(thetas))
        return _blocks(1 / z, 0.0, 0.0, z)

    def phi_minus(thetas):
        z = np.exp(1j * _thetas(thetas))
        pole = 1 - u * v / z
        block = _blocks(np.ones(z.shape), 1 / u, 0.0, pole * (u / z - v))
        return (1 / pole)[:, None, None] * block

    return (
        Factor("-phi_plus", minus_phi_plus, "plus"),
        Factor("D", diagonal, "monomial"),
        Factor("phi_minus", phi_minus, "minus"),
    )


def _make_example2(parameters: Mapping[str, Any], tol: Optional[float] = None) -> ExampleFixture:
    u, v = _example2_uv(parameters)
    two_log_u = 2 * math.log(u)
    return ExampleFixture(
        name="example2",
        parameters={"u": u, "v": v},
        symbol=_example2_symbol(u, v, tol),
        oracle_det=lambda n: SignedLogValue(n * two_log_u, 1.0),
        oracle_G=max(u * u, v * v),
        oracle_indices={
            "class": "D",
            "I_D": 1 if u > v else -1,
            "I_winding": None,
            "predicted_pairs": 1 if u < v else 0,
        },
        # the factor inverses stay analytic only while u < v
        factorization=_example2_factors(u, v) if u < v else None,
    )


# ============================================================================
# EXAMPLE 3
# ============================================================================

def _example3_factors(zeta: complex) -> Tuple[Factor, ...]:
    def p1(thetas):
        t = np.exp(-1j * _thetas(thetas))
        return _blocks(1.0, 0.0, 0.0, 1 + t / zeta)

    def p2(thetas):
        n = _thetas(thetas).size
        return _blocks(np.zeros(n), np.conj(zeta), zeta, 0.0)

    def p3(thetas):
        z = np.exp(1j * _thetas(thetas))
        return _blocks(z, 0.0, 0.0, 1 / z)

    def p4(thetas):
        z = np.exp(1j * _thetas(thetas))
        return _blocks(1.0, 0.0, 0.0, 1 + z / np.conj(zeta))

    return (
        Factor("P1", p1, "minus"),
        Factor("P2", p2, "constant"),
        Factor("P3", p3, "monomial"),
        Factor("P4", p4, "plus"),
    )


def _make_example3(parameters: Mapping[str, Any]) -> ExampleFixture:
    zeta = _example3_zeta(parameters)
    winding = -1 if abs(zeta) > 1 else 0
    symbol = symbol_from_coefficients(
        2,
        {
            0: [[0, 1], [1, 0]],
            1: [[0, np.conj(zeta)], [0, 0]],
            -1: [[0, 0], [zeta, 0]],
        },
        name=f"example3(zeta={_format_param(zeta)})",
    )
    return ExampleFixture(
        name="example3",
        parameters={"zeta": zeta},
        symbol=symbol,
        # det phi = -|1 + zeta z|^2 < 0
        oracle_det=lambda n: SignedLogValue(0.0, -1.0 if n % 2 else 1.0),
        oracle_G=-max(1.0, abs(zeta) ** 2),
        oracle_indices={"class": "AIII", "I_D": None, "I_winding": winding, "predicted_pairs": abs(winding)},
        factorization=_example3_factors(zeta) if abs(zeta) > 1 else None,
    )


# ============================================================================
# PUBLIC API
# ============================================================================

def _parse_number(raw: str) -> complex:
    raw = raw.strip()
    try:
        return float(raw)
    except ValueError:
        return complex(raw.replace("i", "j").replace(" ", ""))


def parse_parameters(text: str) -> Dict[str, complex]:
    """'u=0.3,v=0.6' or 'zeta=1+1j' -> {'u': 0.3, 'v': 0.6}"""
    parameters: Dict[str, complex] = {}
    for item in filter(None, (part.strip() for part in (text or "").split(","))):
        key, sep, raw = item.partition("=")
        if not sep:
            raise ValidationError(f"parameter {item!r} is not key=value")
        try:
            value = _parse_number(raw)
        except ValueError as e:
            raise ValidationError(f"parameter {key.strip()}: cannot parse {raw!r}") from e
        parameters[key.strip()] = value
    return parameters


def make_fixture(name: str, parameters: Mapping[str, Any], tol: Optional[float] = None) -> ExampleFixture:
    """Build a named example; gap-closing parameters raise GaplessSymbolError"""
    if name == "example1":
        fixture = _make_example1(parameters)
    elif name == "example1b":
        fixture = _make_example1b(parameters)
    elif name == "example2":
        fixture = _make_example2(parameters, tol)
    elif name == "example3":
        fixture = _make_example3(parameters)
    else:
        raise FixtureParameterError(
            f"unknown example {name!r}; choose from {', '.join(FIXTURE_NAMES)}", {"fixture": name}
        )
    logger.debug(f"built fixture {fixture.label}", extra={"symbol": fixture.symbol.name})
    return fixture


def _support_tail(samples: np.ndarray, support: str) -> float:
    M = samples.shape[0]
    coeffs = np.fft.ifft(samples, axis=0)
    ks = np.rint(np.fft.fftfreq(M, d=1.0 / M)).astype(int)
    if support == "plus":
        return float(np.max(np.abs(coeffs[ks > 0]), initial=0.0))
    if support == "minus":
        return float(np.max(np.abs(coeffs[ks < 0]), initial=0.0))
    if support == "constant":
        return float(np.max(np.abs(coeffs[ks != 0]), initial=0.0))
    if support == "monomial":
        # diagonal, each diagonal entry a single power
        N = samples.shape[1]
        off = ~np.eye(N, dtype=bool)
        tail = float(np.max(np.abs(coeffs[:, off]), initial=0.0))
        for a in range(N):
            entry = np.abs(coeffs[:, a, a])
            tail = max(tail, float(np.max(np.delete(entry, np.argmax(entry)), initial=0.0)))
        return tail
    raise ValidationError(f"unknown support kind {support!r}")


def verify_factorization(f: ExampleFixture, M: int = 1024) -> FactorizationCheck:
    """Pointwise residual of the stored factor product plus analyticity of each factor and its inverse"""
    if not f.factorization:
        raise MissingFactorizationError(
            f"{f.label} carries no block factorization", {"fixture": f.name, "parameters": dict(f.parameters)}
        )
    thetas = grid_angles(M)
    N = f.symbol.block_size
    product = np.broadcast_to(np.eye(N, dtype=complex), (M, N, N)).copy()
    supports = []
    for factor in f.factorization:
        values = np.asarray(factor.evaluator(thetas), dtype=complex)
        product = product @ values
        supports.append(
            SupportCheck(
                factor.label,
                factor.support,
                _support_tail(values, factor.support),
                _support_tail(np.linalg.inv(values), factor.support),
            )
        )

    target = sample(f.symbol, M).samples
    residual = float(np.max(np.abs(product - target)))
    check = FactorizationCheck(f.label, M, residual, supports)
    logger.info(
        f"factorization of {f.label}: residual {residual:.2e}, supports {'ok' if check.supports_ok else 'violated'}",
        extra={"symbol": f.symbol.name},
    )
    return check
