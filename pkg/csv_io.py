"""
CSV records used by the command-line tools.

Complex vectors are stored with header ``re,im``, point lists with header
``x``, one value per row.  Output reals carry 17 significant digits so a
double survives the round trip exactly.
"""

import csv
import logging
import math
import sys
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from errors import DataFileError

logger = logging.getLogger(__name__)

COMPLEX_HEADER = ["re", "im"]
POINTS_HEADER = ["x"]


def format_real(value) -> str:
    """17-significant-digit text for a float; blank for None or NaN."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return ""
    return format(value, ".17g")


def _read_rows(path: str, header: List[str]) -> Iterable[Tuple[int, List[str]]]:
    try:
        with open(path, "r", newline="") as f:
            reader = csv.reader(f)
            first = next(reader, None)
            if first is None:
                raise DataFileError(path, 1, f"empty file, expected header '{','.join(header)}'")
            if [cell.strip() for cell in first] != header:
                raise DataFileError(path, 1, f"expected header '{','.join(header)}', got '{','.join(first)}'")
            rows = []
            for row in reader:
                if not row or all(not cell.strip() for cell in row):
                    continue
                rows.append((reader.line_num, row))
    except OSError as e:
        raise DataFileError(path, 0, f"cannot read file ({e.strerror or e})")
    if not rows:
        raise DataFileError(path, 2, "no data rows")
    return rows


def _parse_float(path: str, line: int, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFileError(path, line, f"'{text.strip()}' is not a number")
    if not math.isfinite(value):
        raise DataFileError(path, line, f"non-finite value '{text.strip()}'")
    return value


def read_complex(path: str) -> np.ndarray:
    """Read a ``re,im`` file into a complex128 vector."""
    values = []
    for line, row in _read_rows(path, COMPLEX_HEADER):
        if len(row) != 2:
            raise DataFileError(path, line, f"expected 2 columns, got {len(row)}")
        values.append(complex(_parse_float(path, line, row[0]), _parse_float(path, line, row[1])))
    logger.debug(f"Read {len(values)} complex values from {path}")
    return np.array(values, dtype=complex)


def read_points(path: str) -> np.ndarray:
    """Read an ``x`` file into a float vector."""
    values = []
    for line, row in _read_rows(path, POINTS_HEADER):
        if len(row) != 1:
            raise DataFileError(path, line, f"expected 1 column, got {len(row)}")
        values.append(_parse_float(path, line, row[0]))
    logger.debug(f"Read {len(values)} points from {path}")
    return np.array(values, dtype=float)


def _write_rows(f, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_real(v) for v in row])
        count += 1
    return count


def write_table(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    """Write a header row and formatted value rows; path '-' means standard output."""
    if path == "-":
        count = _write_rows(sys.stdout, header, rows)
    else:
        with open(path, "w", newline="") as f:
            count = _write_rows(f, header, rows)
    logger.info(f"Wrote {count} rows to {'stdout' if path == '-' else path}")


def write_complex(path: str, values) -> None:
    values = np.asarray(values, dtype=complex)
    write_table(path, COMPLEX_HEADER, zip(values.real, values.imag))


def write_points(path: str, x) -> None:
    write_table(path, POINTS_HEADER, ([v] for v in np.asarray(x, dtype=float)))


def read_table(path: str) -> Tuple[List[str], List[List[str]]]:
    """Header and raw string rows of any CSV written by write_table."""
    try:
        with open(path, "r", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise DataFileError(path, 0, f"cannot read file ({e.strerror or e})")
    if not rows:
        raise DataFileError(path, 1, "empty file")
    return rows[0], rows[1:]
