"""CSV formats for samples and ratio fields.

Samples CSV: header ``x1,...,xd``, one point per row in generation order.

Field CSV: header ``x1,...,xd,<channel1>,...,<channelK>,flags``, rows in
lattice order, ``flags`` either ``ok`` or a ``;``-joined token list.

Floats are written with ``repr`` (shortest round-trip decimal), so reading a
file back reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from kdre.core import FLAG_OK, GridSpec, RatioField, SampleSet, lattice_points


class CsvFormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def write_samples_csv(sample: SampleSet, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{k + 1}" for k in range(sample.dim)])
        for row in sample.points:
            w.writerow([_fmt(v) for v in row])


def read_samples_csv(path: str | Path) -> SampleSet:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = rows[0]
    if header != [f"x{k + 1}" for k in range(len(header))] or not header:
        raise CsvFormatError(f"{path}: expected header x1,...,xd, got {','.join(header)}")
    try:
        pts = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise CsvFormatError(f"{path}: {exc}") from None
    if pts.size == 0 or pts.ndim != 2 or pts.shape[1] != len(header):
        raise CsvFormatError(f"{path}: expected a nonempty table with {len(header)} columns")
    return SampleSet(pts)


def write_field_csv(field: RatioField, path: str | Path) -> None:
    d = field.grid.dim
    channels = field.channels
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{k + 1}" for k in range(d)] + channels + ["flags"])
        if not channels:
            return
        pts = lattice_points(field.grid)
        flags = field.flag_strings()
        for i, p in enumerate(pts):
            w.writerow([_fmt(v) for v in p] + [_fmt(field.values[c][i]) for c in channels] + [flags[i]])


def read_field_csv(path: str | Path, grid: GridSpec) -> RatioField:
    """Read a field written by :func:`write_field_csv` back onto ``grid``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    d = grid.dim
    header = rows[0]
    if header[:d] != [f"x{k + 1}" for k in range(d)] or header[-1] != "flags":
        raise CsvFormatError(f"{path}: unexpected header {','.join(header)}")
    channels = header[d:-1]
    body = rows[1:]
    if not channels:
        return RatioField(grid, {}, ((),) * grid.size)
    if len(body) != grid.size:
        raise CsvFormatError(f"{path}: expected {grid.size} rows, got {len(body)}")
    values = {c: np.array([float(r[d + j]) for r in body]) for j, c in enumerate(channels)}
    flags = tuple(() if r[-1] == FLAG_OK else tuple(r[-1].split(";")) for r in body)
    return RatioField(grid, values, flags)


def write_gnuplot_script(field: RatioField, csv_name: str, path: str | Path) -> None:
    """A plain gnuplot script plotting every channel of a field CSV."""
    d = field.grid.dim
    lines = ["set datafile separator ','", "set key autotitle columnhead"]
    if d == 1:
        plots = [f"'{csv_name}' using 1:{2 + j} with linespoints" for j in range(len(field.channels))]
        lines.append("plot " + ", \\\n     ".join(plots))
    elif d == 2:
        lines += ["set xlabel 'x1'", "set ylabel 'x2'", "set ticslevel 0"]
        plots = [f"'{csv_name}' using 1:2:{3 + j} with points" for j in range(len(field.channels))]
        lines.append("splot " + ", \\\n      ".join(plots))
    else:
        lines.append(f"# {d}-dimensional fields have no default plot")
    lines.append("pause mouse close")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
