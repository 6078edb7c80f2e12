import csv
import json
import logging
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def get_platform_info() -> Dict[str, str]:
    """Get information about the current platform in a standardized way"""
    return {
        "system": platform.system(),
        "release": platform.release(),
        "machine": platform.machine(),
        "python": platform.python_version(),
    }


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return str(value)


def save_json(data: Any, path: Path) -> Path:
    """Write data as indented JSON, converting numpy values on the way."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=_to_jsonable)
    logger.debug(f"Data saved to {path}")
    return path


def load_json(path: Path) -> Optional[Any]:
    """Load a JSON file, returning None when it does not exist."""
    path = Path(path)
    if not path.exists():
        logger.warning(f"File not found: {path}")
        return None
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    logger.debug(f"Data loaded from {path}")
    return data


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a header row followed by data rows; floats keep full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    logger.debug(f"CSV written to {path}")
    return path


def read_csv_columns(path: Path) -> Dict[str, np.ndarray]:
    """Read a headed numeric CSV into a column-name -> array mapping."""
    with open(path, "r", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows: List[List[float]] = [[float(v) for v in row] for row in reader if row]
    table = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: table[:, i] for i, name in enumerate(header)}
