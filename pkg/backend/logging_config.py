"""
Logging setup for the szego-lab CLI: colored one-line console records on
stderr and an optional YAML-style log file.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from backend.config import get_config

# extra fields recognised on log records, in output order
EXTRA_KEYS = ("command", "symbol", "n", "kind", "duration_ms")


class YAMLFormatter(logging.Formatter):
    """YAML-style log formatter for the log file"""

    def format(self, record):
        lines = [f"- {self.formatTime(record, '%Y-%m-%d %H:%M:%S')}:"]
        lines.append(f"    level: {record.levelname}")
        lines.append(f"    logger: {record.name}")
        lines.append(f"    message: \"{record.getMessage()}\"")

        for key in EXTRA_KEYS:
            if hasattr(record, key):
                lines.append(f"    {key}: {getattr(record, key)}")

        return "\n".join(lines)


class ConsoleYAMLFormatter(logging.Formatter):
    """Compact formatter for the console with colors"""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
    }
    RESET = "\033[0m"

    def __init__(self, use_color: bool = True):
        super().__init__()
        self.use_color = use_color

    def format(self, record):
        color = self.COLORS.get(record.levelname, "") if self.use_color else ""
        reset = self.RESET if self.use_color else ""
        time_str = self.formatTime(record, "%H:%M:%S")

        line = f"{color}[{time_str}] {record.levelname:<8}{reset} | {record.name}: {record.getMessage()}"

        extras = []
        if hasattr(record, "command"):
            extras.append(f"cmd=\"{record.command}\"")
        if hasattr(record, "symbol"):
            extras.append(f"symbol={record.symbol}")
        if hasattr(record, "n"):
            extras.append(f"n={record.n}")
        if hasattr(record, "kind"):
            extras.append(f"kind={record.kind}")
        if hasattr(record, "duration_ms"):
            extras.append(f"{record.duration_ms:.0f}ms")

        if extras:
            line += f" {{ {', '.join(extras)} }}"

        return line


def setup_logging(level: Optional[str] = None, to_file: Optional[bool] = None) -> logging.Logger:
    """Attach handlers to the szego_lab logger tree; safe to call more than once"""
    settings = get_config().logging
    level = (level or settings.level).upper()
    to_file = settings.to_file if to_file is None else to_file

    logger = logging.getLogger("szego_lab")
    logger.setLevel(logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(ConsoleYAMLFormatter(use_color=sys.stderr.isatty()))
    console_handler.setLevel(getattr(logging, level, logging.INFO))
    logger.addHandler(console_handler)

    if to_file:
        log_dir = Path(settings.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        yaml_handler = logging.FileHandler(log_dir / "szego_lab.yaml", encoding="utf-8")
        yaml_handler.setFormatter(YAMLFormatter())
        yaml_handler.setLevel(logging.DEBUG)
        logger.addHandler(yaml_handler)

    # keep records away from the root logger
    logger.propagate = False
    return logger
