"""Run log for the catgen CLI: timestamped lines, capped in size by backups."""

import os
from datetime import datetime
from pathlib import Path
from typing import Optional

from config.constants import DEFAULT_LOG_FILE, LOG_BACKUP_COUNT, LOG_MAX_BYTES


class RunLogger:
    """Appends timestamped lines to a log file and optionally echoes them.

    Passed as the `logger` callable of the pipeline stages, so it is invoked
    with a single message string.
    """

    def __init__(
        self,
        log_file: Optional[Path] = None,
        max_bytes: int = LOG_MAX_BYTES,
        backup_count: int = LOG_BACKUP_COUNT,
        verbose: bool = False,
    ):
        """
        Initialize run logger.

        Args:
            log_file: Path to log file (default: $CATGEN_LOG_FILE or data/catgen.log)
            max_bytes: Size at which the file is moved to the first backup
            backup_count: Number of backups kept as <log>.1 .. <log>.N
            verbose: Echo every line to stdout
        """
        self.log_file = Path(log_file or os.getenv("CATGEN_LOG_FILE", DEFAULT_LOG_FILE))
        self.max_bytes = max_bytes
        self.backup_count = backup_count
        self.verbose = verbose

    def __call__(self, message: str):
        self.log(message)

    def log(self, message: str):
        """Write one line; a full file is shifted into the backups first."""
        line = f"[{datetime.now():%Y-%m-%d %H:%M:%S}] {message}"
        if self.verbose:
            print(line)

        try:
            self.log_file.parent.mkdir(parents=True, exist_ok=True)
            self._rotate_if_full()
            with open(self.log_file, "a", encoding="utf-8") as f:
                f.write(f"{line}\n")
        except OSError as e:
            print(f"[LOG ERROR] {e}")

    def _backup(self, index: int) -> Path:
        return self.log_file.parent / f"{self.log_file.name}.{index}"

    def _rotate_if_full(self):
        try:
            size = self.log_file.stat().st_size
        except FileNotFoundError:
            return
        if size < self.max_bytes:
            return
        # replace() overwrites, so the oldest backup falls off the end
        for index in range(self.backup_count - 1, 0, -1):
            if self._backup(index).exists():
                self._backup(index).replace(self._backup(index + 1))
        if self.backup_count > 0:
            self.log_file.replace(self._backup(1))
        else:
            self.log_file.unlink()
