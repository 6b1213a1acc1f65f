"""CSV ingestion, curve export and JSON serialisation of estimates."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ._validation import PulseError, check_series
from .criterion import ChangePointEstimate
from .curves import PulseCurve

SIG_DIGITS = 12


class CsvFormatError(PulseError):
    """The CSV input cannot be read as a single numeric series."""


def _number(text: str):
    try:
        value = float(text)
    except ValueError:
        return None
    return value


def _is_index_column(values: list) -> bool:
    arr = np.asarray(values)
    return bool(
        arr.size > 0
        and np.all(arr == np.round(arr))
        and (arr.size == 1 or np.all(np.diff(arr) > 0))
    )


def read_series_csv(path) -> np.ndarray:
    """Read a numeric series from a CSV file.

    The file holds one value column, optionally preceded by an index column
    of strictly increasing integers, and optionally topped by one header
    line. Blank lines are ignored.

    Raises
    ------
    CsvFormatError
        On an empty file, a non-numeric cell (the message carries the line
        number), ragged rows, or more columns than can be disambiguated.
    """
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if not any(cells):
                continue
            rows.append((lineno, cells))
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")

    first_line, first = rows[0]
    if any(_number(c) is None for c in first):
        rows = rows[1:]  # header
        if not rows:
            raise CsvFormatError(f"{path}: no data after the header line")
    width = len(first)
    if width > 2:
        raise CsvFormatError(
            f"{path}: ambiguous columns; expected one value column with an "
            f"optional index column, found {width}"
        )

    table = []
    for lineno, cells in rows:
        if len(cells) != width:
            raise CsvFormatError(f"{path}: line {lineno} has {len(cells)} cells, expected {width}")
        parsed = []
        for cell in cells:
            value = _number(cell)
            if value is None or not math.isfinite(value):
                raise CsvFormatError(f"{path}: line {lineno}: cannot parse {cell!r} as a finite number")
            parsed.append(value)
        table.append(parsed)

    if width == 1:
        return check_series([r[0] for r in table])
    index = [r[0] for r in table]
    if not _is_index_column(index):
        raise CsvFormatError(
            f"{path}: ambiguous columns; the first of two columns is not an increasing integer index"
        )
    return check_series([r[1] for r in table])


def fmt_number(value: float) -> str:
    """Locale-free decimal with 12 significant digits."""
    return format(float(value), f".{SIG_DIGITS}g")


def round_sig(value: float) -> float:
    return float(fmt_number(value))


def write_series_csv(path, x, header: str | None = "x") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow([header])
        for v in x:
            writer.writerow([fmt_number(v)])


def curve_rows(x, curve: PulseCurve) -> list:
    """Rows ``(i, x_i, D(i), Dt(i), T(i))`` with ``None`` where a curve is undefined."""
    x = check_series(x)
    rows = []
    for k in range(x.size):
        rows.append((
            k + 1,
            float(x[k]),
            float(curve.d[k]) if k < curve.d.size else None,
            float(curve.dtilde[k]) if k < curve.dtilde.size else None,
            float(curve.t[k]) if k < curve.t.size else None,
        ))
    return rows


def write_curve_csv(path, x, curve: PulseCurve) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "x", "d", "dtilde", "t"])
        for i, *vals in curve_rows(x, curve):
            writer.writerow([i] + ["" if v is None else fmt_number(v) for v in vals])


def estimate_to_dict(estimate: ChangePointEstimate) -> dict:
    data = estimate.to_dict()
    data["minima"] = [round_sig(v) for v in data["minima"]]
    cfg = data["config_used"]
    if cfg is not None:
        cfg["ridge"] = round_sig(cfg["ridge"])
        cfg["tau"] = round_sig(cfg["tau"])
    return data


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def estimate_to_json(estimate: ChangePointEstimate) -> str:
    """Serialise an estimate with floats rounded to 12 significant digits.

    Rounding happens before encoding, so parsing the output and dumping it
    again with `dumps` reproduces it byte for byte.
    """
    return dumps(estimate_to_dict(estimate))


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
