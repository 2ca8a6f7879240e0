"""CSV reading and writing for series panels.

Schema: a header row of series names, then one row per time point with one
numeric cell per series. Decimal point is '.', no missing cells.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .design import SeriesPanel
from .exceptions import ParseError


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


def read_panel_csv(path) -> SeriesPanel:
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot open: {exc.strerror}", path=path) from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not any(h.strip() for h in header):
            raise ParseError("empty file, expected a header row", path=path, row=1)
        names = [h.strip() for h in header]
        if any(not name for name in names):
            raise ParseError("blank series name in header", path=path, row=1)
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(names):
                raise ParseError(f"expected {len(names)} cells, found {len(record)}",
                                 path=path, row=lineno)
            parsed = []
            for col, cell in enumerate(record, start=1):
                text = cell.strip()
                try:
                    value = float(text)
                except ValueError:
                    raise ParseError(f"non-numeric cell {cell!r}", path=path, row=lineno,
                                     column=col) from None
                if not math.isfinite(value):
                    raise ParseError(f"non-finite cell {cell!r}", path=path, row=lineno, column=col)
                parsed.append(value)
            rows.append(parsed)
    if len(rows) < 2:
        raise ParseError(f"need at least 2 data rows, found {len(rows)}", path=path)
    return SeriesPanel(np.array(rows).T, tuple(names))


def write_panel_csv(panel: SeriesPanel, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(panel.series_names)
        for t in range(panel.T):
            writer.writerow([fmt(v) for v in panel.values[:, t]])
    return path
