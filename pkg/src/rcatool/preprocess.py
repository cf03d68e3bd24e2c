"""Dataset cleaning applied before structure learning.

Rules run strictly in order: drop constant columns, drop the later column
of near-collinear pairs (|pearson| > 0.95, pairwise complete), drop
columns then rows that are more than half missing, and finally mean-impute
what is left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import EmptyResult

CORRELATION_THRESHOLD = 0.95
MISSING_FRACTION_LIMIT = 0.5


@dataclass
class PreprocessReport:
    dropped_constant: list[str] = field(default_factory=list)
    dropped_correlated: list[tuple[str, str]] = field(default_factory=list)  # (kept, dropped)
    dropped_missing_columns: list[str] = field(default_factory=list)
    dropped_missing_rows: list[int] = field(default_factory=list)
    imputed_cells: int = 0


def _pairwise_corr(a: np.ndarray, b: np.ndarray) -> float:
    ok = ~np.isnan(a) & ~np.isnan(b)
    if ok.sum() < 2:
        return 0.0
    x, y = a[ok], b[ok]
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0:
        return 0.0
    return float(np.corrcoef(x, y)[0, 1])


def preprocess(ds: Dataset) -> tuple[Dataset, PreprocessReport]:
    report = PreprocessReport()
    cols = list(ds.columns)
    values = ds.values.copy()

    # 1. constant columns (single distinct non-missing value, or all missing)
    keep = []
    for j, c in enumerate(cols):
        col = values[:, j]
        distinct = np.unique(col[~np.isnan(col)])
        if len(distinct) <= 1:
            report.dropped_constant.append(c)
        else:
            keep.append(j)
    values, cols = values[:, keep], [cols[j] for j in keep]

    # 2. collinear pairs: the later column in column order is dropped
    dropped = set()
    for i in range(len(cols)):
        if i in dropped:
            continue
        for j in range(i + 1, len(cols)):
            if j in dropped:
                continue
            if abs(_pairwise_corr(values[:, i], values[:, j])) > CORRELATION_THRESHOLD:
                dropped.add(j)
                report.dropped_correlated.append((cols[i], cols[j]))
    keep = [j for j in range(len(cols)) if j not in dropped]
    values, cols = values[:, keep], [cols[j] for j in keep]

    # 3. columns then rows with > 50% missing
    if values.size:
        col_missing = np.isnan(values).mean(axis=0)
        for j, c in enumerate(cols):
            if col_missing[j] > MISSING_FRACTION_LIMIT:
                report.dropped_missing_columns.append(c)
        keep = [j for j in range(len(cols)) if col_missing[j] <= MISSING_FRACTION_LIMIT]
        values, cols = values[:, keep], [cols[j] for j in keep]
    if not cols:
        raise EmptyResult("no columns survived preprocessing")
    row_missing = np.isnan(values).mean(axis=1)
    row_keep = row_missing <= MISSING_FRACTION_LIMIT
    report.dropped_missing_rows = [int(i) for i in np.flatnonzero(~row_keep)]
    values = values[row_keep]

    # 4. mean imputation of the remaining gaps
    for j in range(values.shape[1]):
        col = values[:, j]
        nan = np.isnan(col)
        if nan.any():
            col[nan] = col[~nan].mean()
            report.imputed_cells += int(nan.sum())

    ts = [t for t, m in zip(ds.timestamps, row_keep) if m] if ds.timestamps else []
    return Dataset(cols, values, ds.product, ts), report
