"""Dataset ingestion and the centering/scaling transform applied before sampling.

The samplers expect a centered response and columns scaled so each column's
sum of squares equals the row count (not n-1). :func:`standardize` records
the transform so held-out rows can be mapped into the fitted scale and
coefficient estimates mapped back out.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DataError

__all__ = [
    "Dataset",
    "StandardizedDataset",
    "load_csv",
    "write_dataset_csv",
    "standardize",
    "apply_standardization",
    "predict",
    "destandardize_coefficients",
]

# Lossless float round-trip through decimal text.
FLOAT_FORMAT = "{:.17g}"


@dataclass
class Dataset:
    """Raw regression data: response ``y`` (n,), design ``X`` (n, p)."""

    y: np.ndarray
    X: np.ndarray
    column_names: list[str]
    provenance: str = "<memory>"

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass
class StandardizedDataset:
    """Centered/scaled data plus the transform parameters.

    Invariants: sum(y_c) = 0, each column of X_s sums to 0 and has sum of
    squares n. ``col_scales`` are root-mean-squares of the centered columns.
    """

    y_c: np.ndarray
    X_s: np.ndarray
    y_mean: float
    col_means: np.ndarray
    col_scales: np.ndarray
    column_names: list[str] = field(default_factory=list)
    provenance: str = "<memory>"

    @property
    def n(self) -> int:
        return self.X_s.shape[0]

    @property
    def p(self) -> int:
        return self.X_s.shape[1]

    @cached_property
    def XtX(self) -> np.ndarray:
        return self.X_s.T @ self.X_s

    @cached_property
    def Xty(self) -> np.ndarray:
        return self.X_s.T @ self.y_c


def load_csv(path) -> Dataset:
    """Read a headered CSV with one column named ``y``; the rest become X.

    Cells must parse as finite numbers; a bad cell is reported with its line
    number and column name.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [row for row in rows if row]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [name.strip() for name in rows[0]]
    if "y" not in header:
        raise DataError(f"{path}: no column named 'y' in header {header}")
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    width = len(header)
    y_col = header.index("y")

    values = np.empty((len(rows) - 1, width))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DataError(f"{path}: line {r} has {len(row)} fields, expected {width}")
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                v = np.nan
            if not np.isfinite(v):
                raise DataError(
                    f"{path}: line {r}, column '{header[c]}': non-numeric or missing value {cell.strip()!r}"
                )
            values[r - 2, c] = v

    if values.shape[0] < 2:
        raise DataError(f"{path}: need at least 2 data rows, got {values.shape[0]}")
    if width < 2:
        raise DataError(f"{path}: need at least one predictor column besides 'y'")
    x_cols = [c for c in range(width) if c != y_col]
    return Dataset(
        y=values[:, y_col].copy(),
        X=values[:, x_cols].copy(),
        column_names=[header[c] for c in x_cols],
        provenance=str(path),
    )


def write_dataset_csv(ds: Dataset, path) -> None:
    """Write a Dataset back to CSV with lossless float formatting."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["y"] + list(ds.column_names)) + "\n")
        for i in range(ds.n):
            cells = [FLOAT_FORMAT.format(ds.y[i])] + [FLOAT_FORMAT.format(v) for v in ds.X[i]]
            fh.write(",".join(cells) + "\n")


def standardize(ds: Dataset) -> StandardizedDataset:
    """Center the response, center and scale each predictor column.

    Raises :class:`DataError` for a constant (zero-variance) column, naming it.
    """
    y = np.asarray(ds.y, dtype=float)
    X = np.asarray(ds.X, dtype=float)
    if X.ndim != 2 or y.shape[0] != X.shape[0]:
        raise DataError("X must be 2-d with one row per response value")
    n = X.shape[0]
    if n < 2:
        raise DataError("standardization needs at least 2 rows")

    y_mean = float(y.mean())
    col_means = X.mean(axis=0)
    Xc = X - col_means
    col_scales = np.sqrt((Xc**2).mean(axis=0))
    bad = col_scales <= 1e-12 * np.maximum(1.0, np.abs(col_means))
    if np.any(bad):
        j = int(np.nonzero(bad)[0][0])
        name = ds.column_names[j] if j < len(ds.column_names) else f"#{j}"
        raise DataError(f"column '{name}' is constant; cannot standardize")

    return StandardizedDataset(
        y_c=y - y_mean,
        X_s=Xc / col_scales,
        y_mean=y_mean,
        col_means=col_means,
        col_scales=col_scales,
        column_names=list(ds.column_names),
        provenance=ds.provenance,
    )


def apply_standardization(sd: StandardizedDataset, X_new: np.ndarray) -> np.ndarray:
    """Map new raw predictor rows into the fitted standardized scale."""
    return (np.asarray(X_new, dtype=float) - sd.col_means) / sd.col_scales


def predict(sd: StandardizedDataset, beta_std: np.ndarray, X_new: np.ndarray) -> np.ndarray:
    """Original-scale predictions from standardized-scale coefficients."""
    return sd.y_mean + apply_standardization(sd, X_new) @ np.asarray(beta_std, dtype=float)


def destandardize_coefficients(sd: StandardizedDataset, beta_std: np.ndarray) -> tuple[float, np.ndarray]:
    """Convert standardized-scale coefficients to (intercept, raw-scale slopes)."""
    beta = np.asarray(beta_std, dtype=float) / sd.col_scales
    intercept = sd.y_mean - float(sd.col_means @ beta)
    return intercept, beta
