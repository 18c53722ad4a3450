"""
Result file management with thread-safe, atomic writes.
"""
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from threading import Lock
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from qei_lab.errors import OutputError

FLOAT_FORMAT = "%.17g"


class ResultStore:
    """Writes data files and provenance sidecars under one output directory."""

    def __init__(self, directory: str):
        """
        Initialize the store.

        Args:
            directory: Output directory, created on demand
        """
        self.directory = Path(directory)
        self.lock = Lock()
        self.written: List[Path] = []
        logger.debug(f"ResultStore initialized: {self.directory}")

    def _ensure_directory(self):
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputError(f"Cannot create output directory {self.directory}: {e}")

    def _atomic_write(self, name: str, text: str) -> Path:
        """Write to a temporary file in the target directory, then rename over the target."""
        target = self.directory / name
        with self.lock:
            self._ensure_directory()
            temp_name = None
            try:
                handle, temp_name = tempfile.mkstemp(dir=self.directory, prefix=f".{name}.", suffix=".tmp")
                with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
                    stream.write(text)
                os.replace(temp_name, target)
            except OSError as e:
                if temp_name is not None and os.path.exists(temp_name):
                    os.unlink(temp_name)
                raise OutputError(f"Failed to write {target}: {e}")
            self.written.append(target)
        logger.info(f"Wrote {target}")
        return target

    def write_table(self, name: str, frame: pd.DataFrame, header: bool = True) -> Path:
        """
        Save a DataFrame as CSV with 17 significant digits.

        Args:
            name: File name inside the output directory
            frame: Table to save
            header: Whether to write the column header
        """
        text = frame.to_csv(index=False, header=header, float_format=FLOAT_FORMAT, lineterminator="\n")
        return self._atomic_write(name, text)

    def write_records(self, name: str, records: Sequence[Dict[str, Any]], columns: Sequence[str],
                      fmt: str = "csv") -> Path:
        """Rows as CSV, or as a JSON list when fmt is 'json'."""
        if fmt == "json":
            return self.write_json(name, list(records))
        return self.write_table(name, pd.DataFrame(list(records), columns=list(columns)))

    def write_matrix(self, name: str, matrix: np.ndarray) -> Path:
        """N lines of N comma-separated values, no header."""
        return self.write_table(name, pd.DataFrame(np.asarray(matrix)), header=False)

    def write_json(self, name: str, document: Any) -> Path:
        text = json.dumps(document, indent=2, default=_json_default) + "\n"
        return self._atomic_write(name, text)

    def write_sidecar(self, data_file: Path, provenance: Dict[str, Any],
                      extra: Optional[Dict[str, Any]] = None) -> Path:
        """`<file>.meta.json` with provenance and a creation timestamp (kept out of data files)."""
        document = {
            "file": data_file.name,
            "provenance": provenance,
            "created_at": datetime.now(timezone.utc).isoformat(),
            **(extra or {}),
        }
        return self.write_json(f"{data_file.name}.meta.json", document)


def _json_default(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
