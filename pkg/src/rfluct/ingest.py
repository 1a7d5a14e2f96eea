"""CSV ingestion with cadence validation and small-gap repair."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IngestError, ResolutionWarning
from .series import SpectrumSeries

# Relative tolerance on cadence uniformity.
CADENCE_TOLERANCE = 0.01

# Largest run of missing samples repaired by linear interpolation.
MAX_GAP_SAMPLES = 2

# Cadence below which a resolution warning is issued, in abscissa units.
WARN_CADENCE = 10.0


@dataclass(frozen=True)
class IngestedSeries:
    """A validated uniform series plus where it came from."""

    series: SpectrumSeries
    source: str
    n_interpolated: int

    @property
    def cadence(self) -> float:
        return self.series.step


def _parse_rows(path: Path, time_column, value_column, delimiter: str):
    times: list[float] = []
    values: list[float] = []
    bad: list[int] = []
    header_names: list[str] | None = None
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if header_names is None and any(c and not _is_number(c) for c in cells):
                header_names = cells
                continue
            ti, vi = _resolve_columns(header_names, time_column, value_column)
            try:
                times.append(float(cells[ti]))
                values.append(float(cells[vi]))
            except (ValueError, IndexError):
                bad.append(lineno)
    if bad:
        shown = ", ".join(str(b) for b in bad[:10])
        more = "" if len(bad) <= 10 else f" (and {len(bad) - 10} more)"
        raise IngestError(f"{path}: unparseable rows at lines {shown}{more}")
    return np.array(times), np.array(values)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _resolve_columns(header_names, time_column, value_column) -> tuple[int, int]:
    def resolve(col):
        if isinstance(col, int):
            return col
        if header_names is None:
            raise IngestError(f"column name {col!r} given but the file has no header")
        try:
            return header_names.index(col)
        except ValueError:
            raise IngestError(f"column {col!r} not found in header {header_names}") from None

    return resolve(time_column), resolve(value_column)


def ingest_csv(path, time_column=0, value_column=1, delimiter: str = ",") -> IngestedSeries:
    """Read a (timestamp, value) CSV and validate it as a uniform series.

    The header row is optional; columns may be given by index or by header
    name.  Timestamps must be strictly increasing with a uniform cadence
    (1% tolerance); gaps of up to two missing samples are repaired by
    linear interpolation and counted, larger gaps are an error.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: no such file")
    times, values = _parse_rows(path, time_column, value_column, delimiter)
    if times.size < 2:
        raise IngestError(f"{path}: need at least two data rows")

    diffs = np.diff(times)
    non_increasing = np.flatnonzero(diffs <= 0)
    if non_increasing.size:
        # report in data-row order (1-based, counting data rows only)
        first = int(non_increasing[0]) + 2
        raise IngestError(
            f"{path}: timestamps are not strictly increasing at data row {first}"
        )

    step = float(np.median(diffs))
    multiples = diffs / step
    rounded = np.round(multiples)
    off = np.flatnonzero(np.abs(multiples - rounded) > CADENCE_TOLERANCE)
    if off.size:
        first = int(off[0]) + 2
        raise IngestError(
            f"{path}: cadence is not uniform (within {CADENCE_TOLERANCE:.0%}) at data row {first}"
        )
    gaps = rounded.astype(int) - 1
    too_big = np.flatnonzero(gaps > MAX_GAP_SAMPLES)
    if too_big.size:
        first = int(too_big[0]) + 2
        raise IngestError(
            f"{path}: gap of {int(gaps[too_big[0]])} missing samples at data row {first} "
            f"exceeds the {MAX_GAP_SAMPLES}-sample repair limit"
        )

    n_interpolated = int(gaps.sum())
    if n_interpolated:
        full_t = times[0] + step * np.arange(int(round((times[-1] - times[0]) / step)) + 1)
        full_v = np.interp(full_t, times, values)
    else:
        full_t = times
        full_v = values

    if step < WARN_CADENCE:
        warnings.warn(
            f"cadence {step} is below the validated {WARN_CADENCE:.0f}-unit resolution",
            ResolutionWarning,
            stacklevel=2,
        )

    series = SpectrumSeries(start=float(full_t[0]), step=step, values=full_v)
    return IngestedSeries(series=series, source=str(path), n_interpolated=n_interpolated)
