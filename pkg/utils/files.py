"""
Small file helpers shared by the generator, the pipeline and the commands.
"""

import hashlib
import json
from pathlib import Path

from utils.errors import DataError


def file_sha256(path):
    """
    Hex SHA-256 digest of a file's bytes

    Args:
        path: file to hash

    Returns:
        str: 64 hex characters
    """
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_json(data, path):
    """Write JSON with sorted keys and a trailing newline so equal content gives equal bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def read_json(path, what="JSON file"):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise DataError(f"Cannot read {what} '{path}': {exc}")
    except json.JSONDecodeError as exc:
        raise DataError(f"{what} '{path}' is not valid JSON: {exc}")
