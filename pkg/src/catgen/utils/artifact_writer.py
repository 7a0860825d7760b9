"""Deterministic CSV and JSON output with atomic writes."""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Sequence

import numpy as np

from config.constants import CSV_FLOAT_FORMAT


def format_value(value: Any) -> str:
    """Floats with 17 significant digits, everything else via str()."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FLOAT_FORMAT)
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no inf/nan; keep them readable
        return value if math.isfinite(value) else str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


class ArtifactWriter:
    """Writes run artifacts into one output directory.

    Every file goes through a temp file and an atomic rename so a crashed run
    never leaves a half-written CSV behind.
    """

    def __init__(
        self,
        out_dir: Path,
        verbose: bool = False,
        logger: Optional[Callable[[str], None]] = None,
    ):
        self.out_dir = Path(out_dir)
        self.verbose = verbose
        self.logger = logger or (lambda msg: None)
        self.written: List[Path] = []

    def _atomic_write(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / name
        temp_file = target.with_suffix(target.suffix + ".tmp")
        with open(temp_file, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        temp_file.replace(target)
        self.written.append(target)
        if self.verbose:
            self.logger(f"[ARTIFACT] Wrote {target}")
        return target

    def write_csv(
        self,
        name: str,
        rows: Iterable[Sequence[Any]],
        header: Optional[Sequence[str]] = None,
    ) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
        return self._atomic_write(name, buffer.getvalue())

    def write_json(self, name: str, payload: Any) -> Path:
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
        return self._atomic_write(name, text)
