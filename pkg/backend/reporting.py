"""
Report writers: deterministic JSON, CSV tables and SVG line charts.
"""

import csv
import io
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "szego-lab"
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from backend import __version__  # noqa: E402
from backend.config import get_config  # noqa: E402
from backend.data_loader import atomic_write_text  # noqa: E402
from services.core.signed_log import SignedLogValue  # noqa: E402

logger = logging.getLogger("szego_lab.cli")

TOOL_NAME = "szego-lab"


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become strings"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, SignedLogValue):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data: Any) -> str:
    """Sorted keys, shortest round-trip floats"""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def report_header(command: str, symbol: Optional[str] = None, n_values: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    """Version, tolerances and grid sizes behind a report"""
    settings = get_config()
    header: Dict[str, Any] = {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "tolerances": settings.tolerances(),
        "grids": {
            "series_grid_start": settings.series.grid_start,
            "series_grid_max": settings.series.grid_max,
            "size_cap": settings.linalg.size_cap,
        },
    }
    if symbol is not None:
        header["symbol"] = symbol
    if n_values:
        header["n_range"] = [min(n_values), max(n_values)]
    return header


def write_json(path: Path, header: Dict[str, Any], body: Dict[str, Any]) -> Path:
    path = atomic_write_text(path, dumps({"header": header, **body}))
    logger.info(f"📄 wrote {path}", extra={"kind": "json"})
    return path


def write_csv(path: Path, columns: List[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(x) for x in row])
    path = atomic_write_text(path, buffer.getvalue())
    logger.info(f"📄 wrote {path}", extra={"kind": "csv"})
    return path


def _csv_cell(x: Any) -> Any:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def write_svg(
    path: Path,
    series: Dict[str, Sequence[Sequence[float]]],
    title: str,
    xlabel: str = "n",
    ylabel: str = "",
) -> Path:
    """Line chart with one line per named (x, y) series"""
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        for label, (xs, ys) in series.items():
            ax.plot(xs, ys, marker="o", markersize=3, label=label)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        if len(series) > 1:
            ax.legend()
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None}, bbox_inches="tight")
    finally:
        plt.close(fig)
    text = buffer.getvalue()
    path = atomic_write_text(path, text)
    logger.info(f"📈 wrote {path}", extra={"kind": "svg"})
    return path


# ============================================================================
# TABLES
# ============================================================================

DET_SCAN_COLUMNS = [
    "n",
    "det_T",
    "det_T_log_abs",
    "det_T_arg",
    "det_C_log_abs",
    "det_C_arg",
    "G_n_log_abs",
    "G_n_arg",
    "log_abs_T_over_G_n",
    "log_abs_T_over_C",
]


def _arg(value: SignedLogValue) -> float:
    return float(np.angle(value.phase))


def det_scan_rows(rows: List[Dict[str, Any]]) -> List[List[Any]]:
    """rows carry n, det_T, det_C, G_n as SignedLogValue"""
    table = []
    for r in rows:
        det_T: SignedLogValue = r["det_T"]
        det_C: SignedLogValue = r["det_C"]
        G_n: SignedLogValue = r["G_n"]
        table.append(
            [
                r["n"],
                det_T.real_value if det_T.is_real else float("nan"),
                det_T.log_abs,
                _arg(det_T),
                det_C.log_abs,
                _arg(det_C),
                G_n.log_abs,
                _arg(G_n),
                (det_T / G_n).log_abs,
                (det_T / det_C).log_abs if not det_C.is_zero else float("nan"),
            ]
        )
    return table


def zero_mode_columns(levels: int) -> List[str]:
    return ["n", *[f"eps_{i + 1}" for i in range(levels)], "gap_circulant"]


def zero_mode_rows(n_values: List[int], epsilons: List[List[float]], gaps: List[float], levels: int) -> List[List[Any]]:
    table = []
    for n, eps, gap in zip(n_values, epsilons, gaps):
        padded = list(eps[:levels]) + [None] * (levels - len(eps[:levels]))
        table.append([n, *padded, gap])
    return table
