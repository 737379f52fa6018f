"""
CSV exports for Monte Carlo reports, p-value histograms and null samples.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from powervar.core.models import CellResult, MonteCarloReport

REPORT_HEADER = ("process", "n", "trials", "B", "sided", "reject_rate", "mean_p")
HISTOGRAM_HEADER = ("bin_lo", "bin_hi", "count")


def _writer(fh: TextIO):
    return csv.writer(fh, lineterminator="\n")


def report_rows(cells: Iterable[CellResult]) -> list[tuple]:
    return [
        (c.kind.value, c.n, c.trials, c.replicates, c.sided.value,
         repr(c.rejection_rate), repr(c.mean_p))
        for c in cells
    ]


def write_report(report: MonteCarloReport, out: str | Path | TextIO) -> None:
    """One row per cell under ``REPORT_HEADER``."""
    rows = report_rows(report.cells)
    if isinstance(out, (str, Path)):
        with Path(out).open("w", newline="") as fh:
            _write_rows(fh, REPORT_HEADER, rows)
    else:
        _write_rows(out, REPORT_HEADER, rows)


def report_csv(report: MonteCarloReport) -> str:
    buf = io.StringIO()
    write_report(report, buf)
    return buf.getvalue()


def write_table(report: MonteCarloReport, path: str | Path) -> None:
    """Rejection rates laid out with lengths as rows and processes as columns."""
    lengths, kinds, rates = report.pivot()
    rows = [
        (n, *(repr(rates[(n, k)]) if (n, k) in rates else "" for k in kinds))
        for n in lengths
    ]
    with Path(path).open("w", newline="") as fh:
        _write_rows(fh, ("n", *(k.value for k in kinds)), rows)


def write_histogram(cell: CellResult, path: str | Path, bins: int = 20) -> None:
    edges, counts = cell.histogram(bins)
    rows = [(repr(float(lo)), repr(float(hi)), int(c))
            for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    with Path(path).open("w", newline="") as fh:
        _write_rows(fh, HISTOGRAM_HEADER, rows)


def write_null_samples(samples: np.ndarray, path: str | Path) -> None:
    """Surrogate power variances, one per line, in replicate order."""
    with Path(path).open("w", newline="") as fh:
        _write_rows(fh, ("omega",), [(repr(float(v)),) for v in samples])


def _write_rows(fh: TextIO, header: tuple, rows: list[tuple]) -> None:
    writer = _writer(fh)
    writer.writerow(header)
    writer.writerows(rows)


def sidecar_paths(report_path: str | Path, report: MonteCarloReport) -> dict:
    """Where the table and per-cell histograms go next to a report file."""
    report_path = Path(report_path)
    stem = report_path.with_suffix("")
    return {
        "table": stem.with_name(f"{stem.name}.table.csv"),
        "histograms": {
            (c.kind, c.n): stem.with_name(f"{stem.name}.{c.kind.value}.n{c.n}.hist.csv")
            for c in report.cells
        },
    }
