"""
Signal files.

A signal file holds one sample per line as two decimal columns ``re,im``, with
an optional single header line starting with ``#``. ``csv_position`` files hold
positions (e.g. drifter tracks) and are differenced into velocities on ingest.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from powervar.core.errors import DegenerateInputError, SignalParseError
from powervar.core.models import ComplexSignal, StrEnum
from powervar.util.logging import get_logger

log = get_logger(__name__, stage="ingest")


class SignalFormat(StrEnum):
    CSV_COMPLEX = "csv_complex"
    CSV_POSITION = "csv_position"


@dataclass(frozen=True, slots=True)
class SignalFile:
    path: Path
    format: SignalFormat = SignalFormat.CSV_COMPLEX

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        object.__setattr__(self, "format", SignalFormat(self.format))


def _parse_row(row: list[str], path: Path, line_no: int) -> complex:
    if len(row) != 2:
        raise SignalParseError(
            f"expected two columns 're,im', got {len(row)}", path=path, line_no=line_no
        )
    try:
        re_part, im_part = float(row[0]), float(row[1])
    except ValueError:
        raise SignalParseError(
            f"cannot parse {','.join(row)!r} as two decimals", path=path, line_no=line_no
        ) from None
    if not (math.isfinite(re_part) and math.isfinite(im_part)):
        raise SignalParseError("non-finite value", path=path, line_no=line_no)
    return complex(re_part, im_part)


def _decode(data: bytes, path: Path) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_no = data.count(b"\n", 0, exc.start) + 1
        raise SignalParseError("not valid UTF-8 text", path=path, line_no=line_no) from None


def read_records(path: str | Path) -> np.ndarray:
    """Parse every data row of a signal file into a complex array.

    Raises:
        SignalParseError: A row is not two finite decimals (the message names
            the file and 1-based line number). Undecodable bytes and NUL
            characters are reported the same way.
        OSError: The file cannot be opened.
    """
    path = Path(path)
    text = _decode(path.read_bytes(), path)
    values: list[complex] = []
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        for row in reader:
            line_no = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if line_no == 1 and row[0].lstrip().startswith("#"):
                continue
            values.append(_parse_row(row, path, line_no))
    except csv.Error as exc:
        raise SignalParseError(str(exc), path=path, line_no=reader.line_num) from None
    return np.array(values, dtype=np.complex128)


def ingest(file: SignalFile | str | Path, differentiate: bool | None = None) -> ComplexSignal:
    """Load a signal file.

    Args:
        file: A ``SignalFile`` or a path (read as ``csv_complex``).
        differentiate: Take first differences z_n = w_{n+1} - w_n of the rows.
            Defaults to ``True`` for ``csv_position`` files only.

    Returns:
        The signal; N - 1 samples when differenced.
    """
    if not isinstance(file, SignalFile):
        fmt = SignalFormat.CSV_POSITION if differentiate else SignalFormat.CSV_COMPLEX
        file = SignalFile(file, fmt)
    if differentiate is None:
        differentiate = file.format is SignalFormat.CSV_POSITION

    rows = read_records(file.path)
    minimum = 3 if differentiate else 2
    if rows.size < minimum:
        raise DegenerateInputError(f"{file.path}: need at least {minimum} rows, got {rows.size}")

    samples = np.diff(rows) if differentiate else rows
    log.debug("ingested", extra={"n": samples.size, "file": str(file.path)})
    return ComplexSignal(samples)


def format_record(value: complex) -> str:
    # repr round-trips float64 exactly
    return f"{float(value.real)!r},{float(value.imag)!r}"


def write_signal(path: str | Path, signal: ComplexSignal) -> Path:
    """Write ``signal`` as a ``csv_complex`` file with a ``# re,im`` header."""
    path = Path(path)
    lines = ["# re,im"] + [format_record(z) for z in signal.samples]
    with path.open("w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
