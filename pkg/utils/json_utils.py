"""JSON helpers shared by the instance loader and the result writers."""
import hashlib
import json
from pathlib import Path
from typing import Any, Dict

import numpy as np

from utils.logger import logger


def read_json(file_path: str | Path) -> Dict[str, Any]:
    """
    Read a JSON document from disk.

    Args:
        file_path: Path to the JSON file

    Returns:
        Parsed JSON object

    Raises:
        FileNotFoundError: if the file does not exist
        ValueError: if the content is not a JSON object
    """
    path = Path(file_path)
    with path.open("r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"Expected a JSON object in {path}, got {type(data).__name__}")
    logger.debug(f"Read JSON document from {path}")
    return data


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers and scalars into plain Python values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def format_float(value: float, digits: int) -> str:
    """Fixed significant-digit rendering; ``-0`` is normalized to ``0``."""
    text = f"{float(value):.{digits}g}"
    return "0" if text in ("-0", "-0.0") else text


def round_floats(value: Any, digits: int) -> Any:
    """Recursively round floats to ``digits`` significant digits for stable JSON."""
    if isinstance(value, float):
        return float(format_float(value, digits))
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [round_floats(v, digits) for v in value]
    return value


def dumps_stable(value: Any, digits: int) -> str:
    """Serialize with sorted keys and fixed precision, newline-terminated."""
    return json.dumps(round_floats(to_jsonable(value), digits), sort_keys=True, indent=2) + "\n"


def config_hash(payload: Dict[str, Any]) -> str:
    """Short content hash of a configuration payload."""
    canonical = json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
