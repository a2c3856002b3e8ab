"""Observation matrix container and CSV ingestion."""

import csv

import numpy as np
from numpy.typing import NDArray

from .errors import ParseError, ConstantColumn


class FeatureMatrix:
    """An n x J real observation matrix with cached column statistics.

    Column ranges feed the default hyperparameters of every prior family,
    so constant columns (zero range) are rejected at construction whenever
    n > 1. Missing or non-finite values are never accepted.
    """

    def __init__(self, values: NDArray):
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.ndim != 2:
            raise ValueError("expected a 2-d array")
        if not np.all(np.isfinite(values)):
            raise ValueError("non-finite value in data")
        self.values = values
        self.n, self.J = values.shape
        self.col_means = values.mean(axis=0)
        self.col_ranges = values.max(axis=0) - values.min(axis=0)
        if self.n > 1:
            for j in range(self.J):
                if self.col_ranges[j] <= 0.0:
                    raise ConstantColumn(j)

    def __repr__(self):
        return f"FeatureMatrix(n={self.n}, J={self.J})"


def ingest_csv(path, header: bool = False) -> FeatureMatrix:
    """Parse a rectangular numeric CSV into a :class:`FeatureMatrix`.

    Parameters
    ----------
    path : str or Path
        File to read.
    header : bool
        When True the first row is skipped.

    Raises
    ------
    ParseError
        On a non-numeric cell or ragged row, with 0-based data coordinates.
    ConstantColumn
        When a column has zero range (n > 1).
    """
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        width = None
        for raw_idx, record in enumerate(reader):
            if header and raw_idx == 0:
                continue
            if not record:
                continue
            row_idx = len(rows)
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise ParseError(row_idx, min(len(record), width),
                                 f"expected {width} columns, found {len(record)}")
            parsed = []
            for col_idx, cell in enumerate(record):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(row_idx, col_idx, f"not a number: {cell!r}") from None
            rows.append(parsed)
    if not rows:
        raise ParseError(0, 0, "empty file")
    return FeatureMatrix(np.asarray(rows, dtype=float))
