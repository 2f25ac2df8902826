"""SeriesTable: sampled curves with metadata, written as CSV or JSON.

CSV layout::

    # key: <json value>
    # ...
    col1,col2,...
    1.0,0.5,...

Floats are written with ``repr`` so parsing recovers every bit; output is
locale independent with LF line endings.  JSON layout is
``{"meta": {...}, "columns": [...], "rows": [[...], ...]}``.
"""

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__


def _plain(value):
    """Convert numpy scalars/arrays inside metadata to JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _fmt(v):
    return repr(float(v))


@dataclass
class SeriesTable:
    columns: tuple
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(str(c) for c in self.columns)
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 1 and len(self.columns) == 1:
            data = data[:, None]
        if data.size == 0:
            data = data.reshape(0, len(self.columns))
        if data.ndim != 2 or data.shape[1] != len(self.columns):
            raise ValueError(
                f"SeriesTable is not rectangular: {len(self.columns)} columns, data shape {data.shape}"
            )
        if len(set(self.columns)) != len(self.columns):
            raise ValueError(f"duplicate column names in {self.columns}")
        self.data = data
        self.meta = _plain(dict(self.meta))

    @classmethod
    def from_columns(cls, columns: dict, meta=None):
        names = list(columns)
        arrays = [np.asarray(columns[k], dtype=np.float64).reshape(-1) for k in names]
        return cls(tuple(names), np.column_stack(arrays) if arrays else np.empty((0, 0)), meta or {})

    @property
    def rows(self):
        return [tuple(r) for r in self.data.tolist()]

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, name):
        return self.data[:, self.columns.index(name)]

    def __eq__(self, other):
        if not isinstance(other, SeriesTable):
            return NotImplemented
        return (
            self.columns == other.columns
            and self.meta == other.meta
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data, equal_nan=True)
        )

    # -- serialisation ----------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO(newline="\n")
        for key, value in self.meta.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=False)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.data:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str):
        meta = {}
        lines = text.split("\n")
        i = 0
        while i < len(lines) and lines[i].startswith("#"):
            key, _, raw = lines[i][1:].strip().partition(":")
            meta[key.strip()] = json.loads(raw)
            i += 1
        if i >= len(lines):
            raise ValueError("CSV has no header line")
        columns = tuple(lines[i].split(","))
        rows = [[float(v) for v in line.split(",")] for line in lines[i + 1:] if line]
        data = np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))
        return cls(columns, data, meta)

    def to_json(self) -> str:
        doc = {"meta": self.meta, "columns": list(self.columns), "rows": self.data.tolist()}
        return json.dumps(doc) + "\n"

    @classmethod
    def from_json(cls, text: str):
        doc = json.loads(text)
        cols = tuple(doc["columns"])
        data = np.array(doc["rows"], dtype=np.float64).reshape(len(doc["rows"]), len(cols))
        return cls(cols, data, doc.get("meta", {}))

    def write(self, path, fmt=None):
        path = Path(path)
        fmt = fmt or path.suffix.lstrip(".") or "csv"
        text = self.to_csv() if fmt == "csv" else self.to_json() if fmt == "json" else None
        if text is None:
            raise ValueError(f"unknown format {fmt!r}")
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return path

    @classmethod
    def read(cls, path, fmt=None):
        path = Path(path)
        fmt = fmt or path.suffix.lstrip(".") or "csv"
        text = path.read_text(encoding="utf-8")
        return cls.from_csv(text) if fmt == "csv" else cls.from_json(text)


def base_meta(**params):
    """Metadata common to every emitted table (software version first)."""
    meta = {"software_version": __version__}
    meta.update(params)
    return _plain(meta)
