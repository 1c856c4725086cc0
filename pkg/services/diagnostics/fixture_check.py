"""
Fixture self-check: runs every closed-form oracle of an example against the
numerical pipeline and reports functional / mismatch / error per check.
"""

import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from services.asymptotics import EClass, classify_E, geometric_mean
from services.core.errors import SzegoLabError
from services.core.signed_log import SignedLogValue
from services.fixtures import ExampleFixture, verify_factorization
from services.structured import build_toeplitz, log_det
from services.topology import predict_zero_modes

logger = logging.getLogger("szego_lab.diagnostics")

# relative tolerances per oracle
DET_TOL = 1e-8
SERIES_DET_TOL = 1e-6  # symbols built from an evaluator carry a truncated series
G_TOL = 1e-9


class CheckStatus(str, Enum):
    FUNCTIONAL = "functional"  # matches the oracle
    MISMATCH = "mismatch"  # ran, disagrees with the oracle
    ERROR = "error"  # raised
    SKIPPED = "skipped"  # oracle not available for these parameters


@dataclass
class OracleCheck:
    """Result of one oracle comparison"""

    check_id: str
    status: CheckStatus
    description: str = ""
    expected: Optional[str] = None
    observed: Optional[str] = None
    error: Optional[str] = None
    tested_at: str = field(default_factory=lambda: datetime.now().isoformat())


@dataclass
class FixtureReport:
    fixture: str
    overall_status: CheckStatus = CheckStatus.FUNCTIONAL
    checks: List[OracleCheck] = field(default_factory=list)
    functional_count: int = 0
    mismatch_count: int = 0
    error_count: int = 0

    @property
    def passed(self) -> bool:
        return self.overall_status == CheckStatus.FUNCTIONAL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixture": self.fixture,
            "status": self.overall_status.value,
            "functional": self.functional_count,
            "mismatch": self.mismatch_count,
            "errors": self.error_count,
            "checks": [{**asdict(c), "status": c.status.value} for c in self.checks],
        }


def _run(check_id: str, description: str, func) -> OracleCheck:
    try:
        ok, expected, observed = func()
    except SzegoLabError as e:
        return OracleCheck(check_id, CheckStatus.ERROR, description, error=f"{e.code}: {e}")
    status = CheckStatus.FUNCTIONAL if ok else CheckStatus.MISMATCH
    return OracleCheck(check_id, status, description, str(expected), str(observed))


def _determinants(f: ExampleFixture, n_values: List[int]):
    tol = SERIES_DET_TOL if f.symbol.evaluator is not None else DET_TOL
    failures = []
    for n in n_values:
        observed = log_det(build_toeplitz(f.symbol, n))
        expected = f.oracle_det(n)
        if not observed.isclose(expected, rel_tol=tol):
            failures.append(n)
    return not failures, f"oracle det for n={n_values[0]}..{n_values[-1]}", f"mismatch at n={failures}" if failures else "all match"


def _geometric_mean(f: ExampleFixture):
    G = geometric_mean(f.symbol)
    expected = SignedLogValue.from_value(f.oracle_G)
    return G.isclose(expected, rel_tol=G_TOL), f.oracle_G, G.real_value


def _indices(f: ExampleFixture):
    report = predict_zero_modes(f.symbol)
    observed = {
        "class": report.cls.tag.value,
        "I_D": report.I_D,
        "I_winding": report.I_winding,
        "predicted_pairs": report.predicted_pairs,
    }
    return observed == dict(f.oracle_indices), dict(f.oracle_indices), observed


def _e_consistency(f: ExampleFixture, n_values: List[int]):
    report = classify_E(f.symbol, n_values)
    pairs = f.oracle_indices["predicted_pairs"]
    expected = EClass.ZERO if pairs else EClass.NONZERO
    return report.E_class == expected, expected.value, report.E_class.value


def _factorization(f: ExampleFixture):
    check = verify_factorization(f)
    return check.passed(), "residual < 1e-8, supports ok", f"residual {check.max_residual:.2e}, supports_ok={check.supports_ok}"


def _calculate_status(report: FixtureReport) -> None:
    for check in report.checks:
        if check.status == CheckStatus.FUNCTIONAL:
            report.functional_count += 1
        elif check.status == CheckStatus.MISMATCH:
            report.mismatch_count += 1
        elif check.status == CheckStatus.ERROR:
            report.error_count += 1

    if report.error_count > 0:
        report.overall_status = CheckStatus.ERROR
    elif report.mismatch_count > 0:
        report.overall_status = CheckStatus.MISMATCH
    else:
        report.overall_status = CheckStatus.FUNCTIONAL


def check_fixture(f: ExampleFixture, n_values: Iterable[int] = range(2, 25)) -> FixtureReport:
    """Compare every oracle of a fixture with the pipeline"""
    n_values = sorted(set(int(n) for n in n_values))
    report = FixtureReport(fixture=f.label)
    report.checks.append(_run("determinants", "det T_n against the closed form", lambda: _determinants(f, n_values)))
    report.checks.append(_run("geometric_mean", "G against the closed form", lambda: _geometric_mean(f)))
    report.checks.append(_run("indices", "class and indices against the expected values", lambda: _indices(f)))
    report.checks.append(
        _run("e_class", "E vanishes exactly when zero modes are predicted", lambda: _e_consistency(f, n_values))
    )
    if f.factorization:
        report.checks.append(_run("factorization", "stored factor product and analyticity", lambda: _factorization(f)))
    else:
        report.checks.append(
            OracleCheck("factorization", CheckStatus.SKIPPED, "no block factorization for these parameters")
        )

    _calculate_status(report)
    icon = "✅" if report.passed else "❌"
    logger.info(
        f"{icon} {f.label}: {report.functional_count} functional, {report.mismatch_count} mismatch, "
        f"{report.error_count} errors",
        extra={"symbol": f.symbol.name},
    )
    return report


def summarize(reports: List[FixtureReport]) -> Dict[str, Any]:
    """Counts over several fixture reports"""
    return {
        "timestamp": datetime.now().isoformat(),
        "summary": {
            "fixtures": len(reports),
            "passed": sum(1 for r in reports if r.passed),
            "failed": sum(1 for r in reports if not r.passed),
        },
        "fixtures": [r.to_dict() for r in reports],
    }
