import os
import re
from collections.abc import Iterable
from pathlib import Path
from typing import TextIO

from gramslice.constants import DEFAULT_OUTPUT_FILE_MODE

_OCTAL_MODE = re.compile(r"(?:0o)?([0-7]{3,4})")


def parse_file_mode(mode: int | str) -> int:
    """Accept 644, "644", "0644" or "0o644"; reject anything outside 000-777."""
    if isinstance(mode, int):
        parsed = mode
    else:
        match = _OCTAL_MODE.fullmatch(mode.strip().lower())
        if match is None:
            raise ValueError(f"Invalid file mode '{mode}': expected octal such as 644 or 0o644")
        parsed = int(match.group(1), 8)

    if not 0 <= parsed <= 0o777:
        raise ValueError(f"File mode {oct(parsed)} is outside 000-777")
    return parsed


def open_text_file_secure(
    path: str | Path,
    file_mode: int = DEFAULT_OUTPUT_FILE_MODE,
    encoding: str = "utf-8",
) -> TextIO:
    """
    Open ``path`` for writing (truncating) with ``file_mode`` applied.

    The mode is passed to os.open for new files and re-applied with fchmod
    so an existing artifact ends up with the same permissions as a fresh one.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, file_mode)
    try:
        os.fchmod(fd, file_mode)
    except (AttributeError, OSError):
        pass  # fchmod is unavailable on Windows
    return os.fdopen(fd, "w", encoding=encoding, newline="\n")


def write_text_file_secure(
    path: str | Path,
    content: str,
    file_mode: int = DEFAULT_OUTPUT_FILE_MODE,
    encoding: str = "utf-8",
) -> None:
    with open_text_file_secure(path, file_mode=file_mode, encoding=encoding) as f:
        f.write(content)


def write_lines_secure(
    path: str | Path,
    lines: Iterable[str],
    file_mode: int = DEFAULT_OUTPUT_FILE_MODE,
) -> int:
    """Write one entry per line (JSONL traces); returns the number of lines written."""
    count = 0
    with open_text_file_secure(path, file_mode=file_mode) as f:
        for line in lines:
            f.write(line)
            f.write("\n")
            count += 1
    return count
