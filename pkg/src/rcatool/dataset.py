"""Observation matrices with column-to-sensor-variable binding.

CSV on disk: header row carries the variable ids, an empty cell is a
missing value. An optional JSON sidecar carries the product id and
per-row ISO-8601 timestamps.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MalformedDocument


@dataclass
class Dataset:
    columns: list[str]
    values: np.ndarray  # N x p float array, NaN marks missing
    product: str | None = None
    timestamps: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise MalformedDocument(
                f"value matrix {self.values.shape} does not match "
                f"{len(self.columns)} columns"
            )
        if len(set(self.columns)) != len(self.columns):
            raise MalformedDocument("duplicate column ids")
        if self.timestamps and len(self.timestamps) != self.n_rows:
            raise MalformedDocument("timestamp count does not match row count")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def column(self, var_id: str) -> np.ndarray:
        return self.values[:, self.columns.index(var_id)]

    def select_columns(self, keep: list[str]) -> "Dataset":
        idx = [self.columns.index(c) for c in keep]
        return Dataset(list(keep), self.values[:, idx], self.product, list(self.timestamps))

    def select_rows(self, mask: np.ndarray) -> "Dataset":
        ts = [t for t, m in zip(self.timestamps, mask) if m] if self.timestamps else []
        return Dataset(list(self.columns), self.values[mask], self.product, ts)

    def filter_window(
        self, product: str | None, start: str | None, end: str | None
    ) -> "Dataset":
        """Keep rows matching the product whose timestamp lies in [start, end]."""
        if product is not None and self.product is not None and product != self.product:
            return self.select_rows(np.zeros(self.n_rows, dtype=bool))
        if not self.timestamps or (start is None and end is None):
            return self
        mask = np.ones(self.n_rows, dtype=bool)
        for i, t in enumerate(self.timestamps):
            if start is not None and t < start:
                mask[i] = False
            if end is not None and t > end:
                mask[i] = False
        return self.select_rows(mask)


def to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    buf.write(",".join(ds.columns) + "\n")
    for row in ds.values:
        cells = ["" if np.isnan(v) else repr(float(v)) for v in row]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def from_csv(text: str, product: str | None = None, timestamps=None) -> Dataset:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedDocument("empty CSV document")
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise MalformedDocument(
                f"row has {len(cells)} cells, expected {len(columns)}"
            )
        rows.append([float(c) if c.strip() else np.nan for c in cells])
    values = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return Dataset(columns, values, product, list(timestamps or []))


def save_dataset(ds: Dataset, csv_path: str | Path) -> None:
    csv_path = Path(csv_path)
    csv_path.write_text(to_csv(ds), encoding="utf-8")
    if ds.product is not None or ds.timestamps:
        sidecar = {"product": ds.product, "timestamps": ds.timestamps}
        csv_path.with_suffix(".meta.json").write_text(
            json.dumps(sidecar), encoding="utf-8"
        )


def load_dataset(csv_path: str | Path) -> Dataset:
    csv_path = Path(csv_path)
    product, timestamps = None, []
    sidecar = csv_path.with_suffix(".meta.json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        product = meta.get("product")
        timestamps = meta.get("timestamps", [])
    return from_csv(csv_path.read_text(encoding="utf-8"), product, timestamps)
