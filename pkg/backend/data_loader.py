"""
Data Loader - symbol files, fixture defaults and atomic JSON writes
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from services.core.errors import SymbolFileError
from services.fixtures import FIXTURE_NAMES
from services.symbols import Symbol, symbol_from_dict, symbol_to_dict

logger = logging.getLogger("szego_lab.data")

# Paths
BASE_DIR = Path(__file__).parent.parent
DATA_DIR = BASE_DIR / "data"
FIXTURES_FILE = DATA_DIR / "fixtures.json"

PathLike = Union[str, Path]


def atomic_write_text(file_path: PathLike, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename over the target"""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{file_path.name}.", dir=file_path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, file_path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return file_path


class DataLoader:
    """Centralized loading of symbol files and fixture data"""

    _cache: Dict[str, Any] = {}

    @classmethod
    def load_json(cls, file_path: PathLike, cache_key: Optional[str] = None) -> Dict:
        """Load JSON file with optional caching; missing files give {}"""
        if cache_key and cache_key in cls._cache:
            return cls._cache[cache_key]

        file_path = Path(file_path)
        if not file_path.exists():
            logger.warning(f"Data file not found: {file_path}")
            return {}

        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)

        if cache_key:
            cls._cache[cache_key] = data
        return data

    @classmethod
    def save_json(cls, file_path: PathLike, data: Any, cache_key: Optional[str] = None) -> Path:
        """Save data to a JSON file atomically, keys sorted"""
        text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
        path = atomic_write_text(file_path, text)
        if cache_key:
            cls._cache[cache_key] = data
        return path

    @classmethod
    def clear_cache(cls, cache_key: Optional[str] = None):
        """Clear cached data"""
        if cache_key:
            cls._cache.pop(cache_key, None)
        else:
            cls._cache.clear()

    # ------------------------------------------------------------------
    # Symbols
    # ------------------------------------------------------------------

    @classmethod
    def load_symbol(cls, file_path: PathLike) -> Symbol:
        file_path = Path(file_path)
        if not file_path.exists():
            raise SymbolFileError(f"symbol file not found: {file_path}", {"path": str(file_path)})
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SymbolFileError(f"{file_path} is not valid JSON: {e}", {"path": str(file_path)}) from e
        symbol = symbol_from_dict(data, name=file_path.stem)
        logger.debug(f"Loaded symbol from {file_path}", extra={"symbol": symbol.name})
        return symbol

    @classmethod
    def save_symbol(cls, symbol: Symbol, file_path: PathLike) -> Path:
        return cls.save_json(file_path, symbol_to_dict(symbol))

    # ------------------------------------------------------------------
    # Fixture data
    # ------------------------------------------------------------------

    @classmethod
    def get_fixture_data(cls) -> Dict:
        """Load data/fixtures.json"""
        return cls.load_json(FIXTURES_FILE, "fixtures")

    @classmethod
    def get_default_parameters(cls, name: str) -> Dict[str, Any]:
        defaults = cls.get_fixture_data().get("defaults", {})
        return dict(defaults.get(name, {}))

    @classmethod
    def get_acceptance_parameters(cls, name: Optional[str] = None) -> Dict[str, List[Dict[str, Any]]]:
        grids = cls.get_fixture_data().get("acceptance", {})
        names = [name] if name else list(FIXTURE_NAMES)
        return {n: [dict(p) for p in grids.get(n, [])] for n in names}

    @classmethod
    def get_n_range(cls, key: str) -> Optional[range]:
        bounds = cls.get_fixture_data().get("n_range", {}).get(key)
        if not bounds:
            return None
        return range(int(bounds[0]), int(bounds[1]) + 1)


# Global instance
data_loader = DataLoader()
