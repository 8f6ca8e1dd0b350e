"""Sampled data series and their CSV / JSON encodings.

CSV layout: one header row of labels, comma separated, LF line endings,
floats written with ``repr`` (shortest round-trip form), first column the
grid. JSON carries the same numbers plus the series name.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SampledSeries", "make_grid"]


def _format(x: float) -> str:
    return repr(float(x))


@dataclass
class SampledSeries:
    name: str
    grid: np.ndarray
    columns: list = field(default_factory=list)  # [(label, values)]
    grid_label: str = "s"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1 or self.grid.size < 1:
            raise ValueError("grid must be a non-empty vector")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        cols = []
        for label, values in self.columns:
            arr = np.asarray(values, dtype=float)
            if arr.shape != self.grid.shape:
                raise ValueError(f"column {label!r} has {arr.size} values for {self.grid.size} grid points")
            cols.append((str(label), arr))
        self.columns = cols

    @property
    def labels(self) -> list:
        return [self.grid_label] + [label for label, _ in self.columns]

    def column(self, label: str) -> np.ndarray:
        for name, values in self.columns:
            if name == label:
                return values
        raise KeyError(label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampledSeries):
            return NotImplemented
        if self.labels != other.labels or self.grid.shape != other.grid.shape:
            return False
        same = [np.array_equal(self.grid, other.grid)]
        same += [np.array_equal(a, b, equal_nan=True) for (_, a), (_, b) in zip(self.columns, other.columns)]
        return all(same)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.labels)
        data = [self.grid] + [values for _, values in self.columns]
        for row in zip(*data):
            writer.writerow([_format(x) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, name: str = "") -> "SampledSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty CSV")
        header, body = rows[0], rows[1:]
        table = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(len(body), len(header))
        columns = [(label, table[:, j]) for j, label in enumerate(header[1:], start=1)]
        return cls(name, table[:, 0], columns, grid_label=header[0])

    def to_json(self) -> str:
        def clean(values):
            return [float(v) if math.isfinite(v) else None for v in values]

        payload = {
            "name": self.name,
            "grid_label": self.grid_label,
            "grid": clean(self.grid),
            "columns": {label: clean(values) for label, values in self.columns},
        }
        return json.dumps(payload, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SampledSeries":
        payload = json.loads(text)

        def restore(values):
            return np.array([math.nan if v is None else v for v in values], dtype=float)

        columns = [(label, restore(values)) for label, values in payload["columns"].items()]
        return cls(payload["name"], restore(payload["grid"]), columns, grid_label=payload["grid_label"])

    def dumps(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def make_grid(lo: float, hi: float, points: int) -> np.ndarray:
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"need grid_min < grid_max, got [{lo}, {hi}]")
    if points < 2:
        raise ValueError(f"need at least 2 grid points, got {points}")
    return np.linspace(lo, hi, points)
