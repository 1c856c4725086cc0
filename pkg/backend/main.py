"""
SZEGO LAB - command-line driver
Block Toeplitz determinants, Szego-Widom asymptotics, topological indices and
zero modes for matrix-valued symbols

Exit codes: 0 ok, 1 usage / I-O / validation, 2 theorem hypothesis violated
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError as RequestValidationError

from backend import __version__
from backend.config import get_config, reload_config
from backend.data_loader import atomic_write_text, data_loader
from backend.logging_config import setup_logging
from backend.models import AnalysisRequest, parse_n_range, parse_outputs
from backend.reporting import (
    DET_SCAN_COLUMNS,
    det_scan_rows,
    dumps,
    report_header,
    write_csv,
    write_json,
    write_svg,
    zero_mode_columns,
    zero_mode_rows,
)
from backend.scan_runner import run_scan
from services.asymptotics import (
    analyze_asymptotics,
    brute_force_winding_det,
    determinant_row,
    geometric_mean,
    winding_theorem_log,
    wiener_hopf_scalar,
)
from services.core.errors import SzegoLabError, ValidationError
from services.diagnostics import check_fixture, summarize
from services.fixtures import FIXTURE_NAMES, ExampleFixture, make_fixture, parse_parameters, verify_factorization
from services.structured import build_toeplitz, circulant_log_det, eigensystem
from services.symbols import Symbol, scalar_symbol
from services.topology import predict_zero_modes
from services.zero_modes import (
    power_iteration_mode,
    spectral_hausdorff_distance,
    spectrum_row,
    zero_mode_scan,
)
from services.zero_modes.scan import REPORTED_LEVELS

logger = logging.getLogger("szego_lab.cli")


class UsageError(ValidationError):
    code = "usage_error"


class ReportIOError(ValidationError):
    code = "io_error"


class CliParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to exit 1"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ============================================================================
# ARGUMENTS
# ============================================================================

def _add_common(p: argparse.ArgumentParser, source: bool = True, n_range: bool = True, outputs: bool = True):
    if source:
        p.add_argument("--example", choices=FIXTURE_NAMES, help="built-in example symbol")
        p.add_argument("--params", default="", help="example parameters, e.g. u=0.3,v=0.6")
        p.add_argument("--symbol-file", help="symbol JSON file")
    if n_range:
        p.add_argument("--n", default=None, help="inclusive range of n, e.g. 6..16")
    if outputs:
        p.add_argument("--out", default=None, help="comma-separated outputs: json,csv,svg")
        p.add_argument("--out-dir", default=None, help="directory for report files")
    p.add_argument("--tol", type=float, default=None, help="Fourier series tolerance")
    p.add_argument("--workers", type=int, default=None, help="concurrent per-n jobs")
    p.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="szego-lab", description="Block Toeplitz determinants and zero modes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=CliParser)
    sub.required = True

    _add_common(sub.add_parser("analyze", help="indices, asymptotics and zero modes"))
    _add_common(sub.add_parser("det-scan", help="det T_n, det C_n and G^n over n"))
    _add_common(sub.add_parser("indices", help="symmetry class and indices"), n_range=False)
    _add_common(sub.add_parser("zero-modes", help="zero-mode scan and power iteration"))

    p = sub.add_parser("factor-check", help="verify a stored block factorization")
    _add_common(p, n_range=False, outputs=False)
    p.add_argument("--grid", type=int, default=1024, help="grid size for the residual")

    p = sub.add_parser("wiener-hopf", help="scalar Wiener-Hopf factorization")
    p.add_argument("--coeffs", default=None, help="scalar coefficients 'k:value,...'")
    p.add_argument("--symbol-file", help="block-size-1 symbol JSON file")
    p.add_argument("--m", type=int, default=None, help="winding to put back, for the winding theorem")
    p.add_argument("--n", type=int, default=None, help="matrix size for the winding theorem")
    p.add_argument("--method", choices=("asymptotic", "exact"), default="exact")
    _add_common(p, source=False, n_range=False)

    p = sub.add_parser("verify", help="check fixtures against their closed forms")
    p.add_argument("--example", choices=FIXTURE_NAMES, help="one example (default: all)")
    p.add_argument("--params", default="", help="example parameters")
    p.add_argument("--acceptance", action="store_true", help="run the full acceptance parameter grid")
    p.add_argument("--n", default=None, help="inclusive range of n, default 2..24")
    _add_common(p, source=False, n_range=False)
    return parser


def parse_coeffs(text: str) -> Dict[int, complex]:
    """'0:1,1:-0.5' -> {0: 1, 1: -0.5}"""
    coeffs: Dict[int, complex] = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        k, sep, raw = item.partition(":")
        if not sep:
            raise UsageError(f"coefficient {item!r} is not k:value")
        try:
            coeffs[int(k)] = complex(raw.strip().replace("i", "j"))
        except ValueError as e:
            raise UsageError(f"cannot parse coefficient {item!r}") from e
    if not coeffs:
        raise UsageError("no coefficients given")
    return coeffs


# ============================================================================
# REQUEST AND SYMBOL
# ============================================================================

def _apply_overrides(args: argparse.Namespace) -> None:
    settings = get_config()
    if getattr(args, "tol", None) is not None:
        if args.tol <= 0:
            raise UsageError(f"--tol must be positive, got {args.tol}")
        settings.series.tol = args.tol
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise UsageError(f"--workers must be at least 1, got {args.workers}")
        settings.scan.workers = args.workers


def _request(args: argparse.Namespace, default_outputs: Sequence[str], default_n: str = "scan") -> AnalysisRequest:
    settings = get_config()
    if getattr(args, "n", None):
        n_min, n_max = parse_n_range(args.n)
    else:
        default = data_loader.get_n_range(default_n) or range(settings.zero_modes.n_min, settings.zero_modes.n_max + 1)
        n_min, n_max = default.start, default.stop - 1
    try:
        return AnalysisRequest(
            example=args.example,
            params=parse_parameters(args.params) if args.example else {},
            symbol_file=args.symbol_file,
            n_min=n_min,
            n_max=n_max,
            tol=args.tol,
            outputs=parse_outputs(args.out) if args.out else list(default_outputs),
            out_dir=args.out_dir or settings.report.out_dir,
        )
    except RequestValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise ValidationError(f"invalid request: {messages}", {"errors": [err["msg"] for err in e.errors()]}) from e


def _fixture(name: str, params: Dict[str, Any]) -> ExampleFixture:
    params = params or data_loader.get_default_parameters(name)
    return make_fixture(name, params)


def resolve_symbol(req: AnalysisRequest) -> Tuple[Symbol, Optional[ExampleFixture]]:
    if req.example:
        fixture = _fixture(req.example, req.params)
        symbol = fixture.symbol
    else:
        fixture = None
        symbol = data_loader.load_symbol(req.symbol_file)
    req.check_size_cap(symbol.block_size, get_config().linalg.size_cap)
    return symbol, fixture


def _out_path(req: AnalysisRequest, name: str) -> Path:
    return Path(req.out_dir) / name


def _emit(summary: Dict[str, Any]) -> None:
    sys.stdout.write(dumps(summary))


# ============================================================================
# COMMANDS
# ============================================================================

def _det_rows(symbol: Symbol, n_values: range) -> Tuple[Any, List[Dict[str, Any]]]:
    G = geometric_mean(symbol)

    def job(n: int) -> Dict[str, Any]:
        row = determinant_row(symbol, n, G)
        row["det_C"] = circulant_log_det(symbol, n)
        return row

    return G, run_scan(job, n_values, label="det")


def cmd_analyze(args: argparse.Namespace) -> int:
    req = _request(args, get_config().report.outputs)
    symbol, fixture = resolve_symbol(req)
    n_values = req.n_values

    indices = predict_zero_modes(symbol)
    G, rows = _det_rows(symbol, n_values)
    asymptotics = analyze_asymptotics(
        symbol, n_values, rows=[{k: r[k] for k in ("n", "det", "ratio")} for r in rows],
        predicted_pairs=indices.predicted_pairs,
    )
    spectra = run_scan(lambda n: spectrum_row(symbol, n), n_values, label="spectrum")
    zero_modes = zero_mode_scan(symbol, n_values, rows=spectra)

    header = report_header("analyze", symbol.name, list(n_values))
    if "json" in req.outputs:
        write_json(
            _out_path(req, "analysis.json"),
            header,
            {"indices": indices, "asymptotics": asymptotics, "zero_modes": zero_modes},
        )
    if "csv" in req.outputs:
        _write_det_csv(req, rows, G)
        _write_zero_mode_csv(req, zero_modes)
    if "svg" in req.outputs:
        _write_det_svg(req, rows, G, symbol.name)
        _write_zero_mode_svg(req, zero_modes, symbol.name)

    _emit(
        {
            "success": True,
            "command": "analyze",
            "symbol": symbol.name,
            "class": indices.cls.tag.value,
            "I_D": indices.I_D,
            "I_winding": indices.I_winding,
            "predicted_pairs": indices.predicted_pairs,
            "G": G,
            "E_class": asymptotics.E_class,
            "E_estimate": asymptotics.E_estimate,
            "E_tilde_estimate": asymptotics.E_tilde_estimate,
            "pair_count": zero_modes.pair_count,
            "fitted_rate": zero_modes.fitted_rate,
        }
    )
    return 0


def _scan_table(rows: List[Dict[str, Any]], G) -> List[Dict[str, Any]]:
    return [{"n": r["n"], "det_T": r["det"], "det_C": r["det_C"], "G_n": G ** r["n"]} for r in rows]


def _write_det_csv(req: AnalysisRequest, rows, G) -> None:
    write_csv(_out_path(req, "det_scan.csv"), DET_SCAN_COLUMNS, det_scan_rows(_scan_table(rows, G)))


def _write_det_svg(req: AnalysisRequest, rows, G, name: str) -> None:
    ns = [r["n"] for r in rows]
    write_svg(
        _out_path(req, "det_scan.svg"),
        {
            "log|det T_n / G^n|": (ns, [r["ratio"].log_abs for r in rows]),
            "log|det T_n / det C_n|": (ns, [(r["det"] / r["det_C"]).log_abs for r in rows]),
        },
        title=f"determinant ratios, {name}",
        ylabel="log magnitude",
    )


def _write_zero_mode_csv(req: AnalysisRequest, report) -> None:
    write_csv(
        _out_path(req, "zero_modes.csv"),
        zero_mode_columns(REPORTED_LEVELS),
        zero_mode_rows(report.n_values, report.epsilons, report.gaps, REPORTED_LEVELS),
    )


def _write_zero_mode_svg(req: AnalysisRequest, report, name: str) -> None:
    lines = {}
    for level in range(min(4, min(len(e) for e in report.epsilons))):
        lines[f"|eps_{level + 1}|"] = (report.n_values, [float(np.log(max(e[level], 1e-300))) for e in report.epsilons])
    write_svg(_out_path(req, "zero_modes.svg"), lines, title=f"smallest |eps| of T_n, {name}", ylabel="log |eps|")


def cmd_det_scan(args: argparse.Namespace) -> int:
    req = _request(args, ["csv"], default_n="det")
    symbol, _ = resolve_symbol(req)
    G, rows = _det_rows(symbol, req.n_values)
    table = _scan_table(rows, G)

    if "json" in req.outputs:
        write_json(
            _out_path(req, "det_scan.json"),
            report_header("det-scan", symbol.name, list(req.n_values)),
            {"G": G, "rows": table},
        )
    if "csv" in req.outputs:
        _write_det_csv(req, rows, G)
    if "svg" in req.outputs:
        _write_det_svg(req, rows, G, symbol.name)

    slope = float(np.polyfit([r["n"] for r in rows], [r["det"].log_abs for r in rows], 1)[0])
    _emit({"success": True, "command": "det-scan", "symbol": symbol.name, "G": G, "log_det_slope": slope})
    return 0


def cmd_indices(args: argparse.Namespace) -> int:
    req = _request(args, [])
    symbol, _ = resolve_symbol(req)
    report = predict_zero_modes(symbol)
    if "json" in req.outputs:
        write_json(_out_path(req, "indices.json"), report_header("indices", symbol.name), {"indices": report})
    _emit({"success": True, "command": "indices", "symbol": symbol.name, **report.to_dict()})
    return 0


def cmd_zero_modes(args: argparse.Namespace) -> int:
    req = _request(args, get_config().report.outputs)
    symbol, _ = resolve_symbol(req)
    n_values = req.n_values
    spectra = run_scan(lambda n: spectrum_row(symbol, n), n_values, label="spectrum")
    report = zero_mode_scan(symbol, n_values, rows=spectra)

    hausdorff = run_scan(
        lambda n: (n, spectral_hausdorff_distance(symbol, n, report.pair_count)), n_values, label="hausdorff"
    )
    power: Optional[Dict[str, Any]] = None
    if report.pair_count > 0:
        n = req.n_max
        result = power_iteration_mode(symbol, n)
        vectors = eigensystem(build_toeplitz(symbol, n)).vectors[:, : 2 * report.pair_count]
        overlap = float(np.max(np.abs(vectors.conj().T @ result.vector)))
        power = {
            "n": n,
            "residual": result.residual,
            "energy": result.energy,
            "gap": result.gap,
            "is_zero_mode": result.is_zero_mode,
            "overlap": overlap,
            "seed_site": result.seed_site,
            "component": result.component,
            "solves": result.solves,
        }

    if "json" in req.outputs:
        write_json(
            _out_path(req, "zero_modes.json"),
            report_header("zero-modes", symbol.name, list(n_values)),
            {
                "zero_modes": report,
                "power_iteration": power,
                "hausdorff": [{"n": n, "distance": d} for n, d in hausdorff],
            },
        )
    if "csv" in req.outputs:
        _write_zero_mode_csv(req, report)
    if "svg" in req.outputs:
        _write_zero_mode_svg(req, report, symbol.name)

    _emit(
        {
            "success": True,
            "command": "zero-modes",
            "symbol": symbol.name,
            "pair_count": report.pair_count,
            "fitted_rate": report.fitted_rate,
            "coeff_decay_rate": report.coeff_decay_rate,
            "coeff_decay_ratios": report.coeff_decay_ratios,
            "root_gap": report.root_gap,
            "power_iteration": power,
        }
    )
    return 0


def cmd_factor_check(args: argparse.Namespace) -> int:
    if not args.example:
        raise UsageError("factor-check needs --example")
    fixture = _fixture(args.example, parse_parameters(args.params))
    check = verify_factorization(fixture, args.grid)
    passed = check.passed(1e-8)
    _emit({"success": passed, "command": "factor-check", **check.to_dict()})
    if not passed:
        logger.error(f"❌ factorization of {fixture.label} failed", extra={"command": "factor-check"})
    return 0 if passed else 1


def cmd_wiener_hopf(args: argparse.Namespace) -> int:
    if (args.coeffs is None) == (args.symbol_file is None):
        raise UsageError("give exactly one of --coeffs or --symbol-file")
    symbol = scalar_symbol(parse_coeffs(args.coeffs), name="p") if args.coeffs else data_loader.load_symbol(args.symbol_file)
    factorization = wiener_hopf_scalar(symbol)
    summary: Dict[str, Any] = {"success": True, "command": "wiener-hopf", "factorization": factorization}

    if args.m is not None or args.n is not None:
        if args.m is None or args.n is None:
            raise UsageError("the winding theorem needs both --m and --n")
        predicted = winding_theorem_log(symbol, args.m, args.n, args.method)
        brute = brute_force_winding_det(symbol, args.m, args.n)
        summary["winding_theorem"] = {
            "m": args.m,
            "n": args.n,
            "method": args.method,
            "det": predicted,
            "brute_force": brute,
            "relative_error": abs(predicted.value - brute.value) / max(abs(brute.value), 1e-300),
        }

    outputs = parse_outputs(args.out) if args.out else []
    if "json" in outputs:
        out_dir = Path(args.out_dir or get_config().report.out_dir)
        write_json(out_dir / "wiener_hopf.json", report_header("wiener-hopf", symbol.name), summary)
    _emit(summary)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.n:
        lo, hi = parse_n_range(args.n)
        n_values = range(lo, hi + 1)
    else:
        n_values = data_loader.get_n_range("verify") or range(2, 25)
    if args.acceptance:
        grids = data_loader.get_acceptance_parameters(args.example)
        fixtures = [make_fixture(name, p) for name, params in grids.items() for p in params]
    elif args.example:
        fixtures = [_fixture(args.example, parse_parameters(args.params))]
    else:
        fixtures = [_fixture(name, {}) for name in FIXTURE_NAMES]

    reports = [check_fixture(f, n_values) for f in fixtures]
    summary = summarize(reports)
    outputs = parse_outputs(args.out) if args.out else []
    if "json" in outputs:
        out_dir = Path(args.out_dir or get_config().report.out_dir)
        write_json(out_dir / "verify.json", report_header("verify", n_values=list(n_values)), summary)
    passed = all(r.passed for r in reports)
    _emit({"success": passed, "command": "verify", **summary["summary"], "fixtures": [r.to_dict() for r in reports]})
    return 0 if passed else 1


COMMANDS = {
    "analyze": cmd_analyze,
    "det-scan": cmd_det_scan,
    "indices": cmd_indices,
    "zero-modes": cmd_zero_modes,
    "factor-check": cmd_factor_check,
    "wiener-hopf": cmd_wiener_hopf,
    "verify": cmd_verify,
}


def _write_error_file(args: Optional[argparse.Namespace], error: SzegoLabError) -> None:
    out_dir = getattr(args, "out_dir", None) if args is not None else None
    if not out_dir:
        return
    try:
        atomic_write_text(Path(out_dir) / "error.json", dumps(error.to_dict()))
    except OSError as e:
        logger.debug(f"could not write error.json: {e}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    reload_config()
    args: Optional[argparse.Namespace] = None
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level)
        _apply_overrides(args)
        started = time.perf_counter()
        code = COMMANDS[args.command](args)
        logger.info(
            f"✅ {args.command} finished" if code == 0 else f"⚠️ {args.command} finished with exit {code}",
            extra={"command": args.command, "duration_ms": (time.perf_counter() - started) * 1000},
        )
        return code
    except SzegoLabError as e:
        command = getattr(args, "command", None) or "usage"
        logger.error(f"❌ {e.code}: {e.message}", extra={"command": command})
        sys.stdout.write(dumps(e.to_dict()))
        _write_error_file(args, e)
        return e.exit_code
    except OSError as e:
        error = ReportIOError(f"I/O error: {e}", {"path": getattr(e, "filename", None)})
        sys.stdout.write(dumps(error.to_dict()))
        return 1


if __name__ == "__main__":
    sys.exit(main())
