"""Parameter-sweep records and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = ["SweepResult", "format_number", "find_crossover", "parse_grid", "atomic_write"]

_MIN_DIGITS = 12


def format_number(value: float) -> str:
    """Shortest round-trip decimal, padded to at least 12 significant digits."""
    value = float(value)
    if not math.isfinite(value):
        return repr(value)
    text = repr(value)
    mantissa = text.lower().split("e")[0].lstrip("-").replace(".", "").lstrip("0")
    if len(mantissa) >= _MIN_DIGITS:
        return text
    return format(value, f"#.{_MIN_DIGITS}g")


@dataclass
class SweepResult:
    """Values of one or more quantities on a strictly increasing parameter grid.

    ``columns`` maps column name to a sequence the same length as ``grid``;
    conventionally ``value_ng`` holds the heralded-state quantity and
    ``value_ref`` the un-subtracted reference.
    """

    parameter: str
    grid: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1:
            raise ValueError("grid must be one-dimensional")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")
        cols = {}
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != self.grid.shape:
                raise ValueError(f"column {name!r} has {arr.size} values for {self.grid.size} grid points")
            cols[name] = arr
        self.columns = cols

    @property
    def header(self) -> list[str]:
        return [self.parameter, *self.columns]

    def __getitem__(self, name: str) -> np.ndarray:
        if name == self.parameter:
            return self.grid
        return self.columns[name]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        cols = list(self.columns.values())
        for k, g in enumerate(self.grid):
            writer.writerow([format_number(g), *(format_number(c[k]) for c in cols)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        data = np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), len(header))
        columns = {name: data[:, k] for k, name in enumerate(header[1:], start=1)}
        return cls(header[0], data[:, 0], columns)

    def to_json(self) -> str:
        # Numbers are emitted through format_number so JSON and CSV agree digit for digit.
        payload = {
            "parameter": self.parameter,
            "metadata": self.metadata,
            "grid": [_RawNumber(v) for v in self.grid],
            "columns": {k: [_RawNumber(v) for v in c] for k, c in self.columns.items()},
        }
        return _dumps(payload) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SweepResult":
        payload = json.loads(text)
        return cls(
            payload["parameter"],
            payload["grid"],
            {k: v for k, v in payload["columns"].items()},
            payload.get("metadata", {}),
        )

    def write(self, path: str | os.PathLike, fmt: str = "csv") -> None:
        text = self.to_csv() if fmt == "csv" else self.to_json()
        atomic_write(path, text)


class _RawNumber:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = float(value)


def _dumps(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, _RawNumber):
        if not math.isfinite(obj.value):
            return "null"
        return format_number(obj.value)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if obj and all(isinstance(v, _RawNumber) for v in obj):
            return "[" + ", ".join(_dumps(v) for v in obj) + "]"
        if not obj:
            return "[]"
        items = [f"{pad}{_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    if isinstance(obj, float):
        return _dumps(_RawNumber(obj))
    return json.dumps(obj)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file so failures leave nothing behind."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``min:max:points`` (inclusive, linearly spaced) or a single value."""
    parts = str(spec).split(":")
    if len(parts) == 1:
        return np.array([float(parts[0])])
    if len(parts) != 3:
        raise ValueError(f"grid spec must be 'min:max:points' or a number, got {spec!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise ValueError(f"grid needs at least one point, got {n}")
    if n == 1:
        if lo != hi:
            raise ValueError("a one-point grid needs min == max")
        return np.array([lo])
    if not hi > lo:
        raise ValueError(f"grid max must exceed min in {spec!r}")
    return np.linspace(lo, hi, n)


def find_crossover(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    step: float = 1e-3,
    rising: bool = True,
    xtol: float = 1e-6,
) -> float | None:
    """Locate the last sign change of ``func`` on ``[lo, hi]`` in the requested direction.

    A linear scan at ``step`` brackets the root and Brent's method refines it.
    ``rising=True`` looks for ``func`` going from negative to non-negative.
    Returns ``None`` when no such crossing exists.
    """
    n = max(2, int(round((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, n)
    vals = np.array([func(x) for x in grid])
    if rising:
        hits = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    else:
        hits = np.nonzero((vals[:-1] > 0) & (vals[1:] <= 0))[0]
    if hits.size == 0:
        return None
    k = hits[-1]
    if vals[k + 1] == 0.0:
        return float(grid[k + 1])
    return float(brentq(func, grid[k], grid[k + 1], xtol=xtol))


def crossing_series(grid: Sequence[float], a: Sequence[float], b: Sequence[float]) -> list[float]:
    """Linearly interpolated abscissae where two sampled curves cross."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    g = np.asarray(grid, dtype=float)
    out = []
    for k in range(len(d) - 1):
        if d[k] == 0.0:
            out.append(float(g[k]))
        elif d[k] * d[k + 1] < 0:
            out.append(float(g[k] - d[k] * (g[k + 1] - g[k]) / (d[k + 1] - d[k])))
    return out
