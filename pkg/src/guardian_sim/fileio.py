"""Output helpers: fixed-precision formatting and atomic file writes."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any


def fmt9(value: float) -> str:
    """Fixed 9-significant-digit rendering, for reproducible diffs."""
    return f"{value:.9g}"


def round9(value: float) -> float:
    """Round to 9 significant digits (for JSON payloads)."""
    return float(fmt9(value))


def json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_text_atomic(path: Path, text: str) -> None:
    """Write via a sibling temp file + rename, so failures never leave a
    partial file at the destination."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
