"""CSV and JSON readers/writers for grids, sinograms and study outputs.

Every CSV starts with the schema line ``# radon-spectral v1``; further lines
starting with ``#`` are metadata and ignored on read.  JSON is written with
sorted keys and a trailing newline so equal results give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

import numpy as np

from .design import CSV_HEADER, grid_from_arrays
from .errors import UsageError
from .estimator import SinogramData

OUTDIR_ENV = "RADON_SPECTRAL_OUTDIR"


def output_dir() -> Path:
    return Path(os.environ.get(OUTDIR_ENV, "."))


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def table_to_csv(columns, rows, meta_line=None) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    if meta_line:
        buf.write("# " + meta_line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text: str):
    if path is None or str(path) == "-":
        print(text, end="")
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_table(path) -> dict[str, np.ndarray]:
    """Columns of a versioned CSV as float arrays."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise UsageError(f"{path} is not a {CSV_HEADER[2:]} CSV file")
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    reader = csv.reader(body)
    header = next(reader)
    data = np.array([[float(v) for v in row] for row in reader], dtype=float).reshape(-1, len(header))
    return {name: data[:, j] for j, name in enumerate(header)}


def sinogram_to_csv(data: SinogramData) -> str:
    return data.grid.to_csv(y=data.y, meta_line="meta " + json.dumps(data.meta, sort_keys=True))


def read_sinogram(path) -> SinogramData:
    """Sinogram CSV (``k1,k2,s,phi,weight,y``) to :class:`SinogramData`."""
    cols = read_table(path)
    missing = {"k1", "k2", "s", "phi", "weight", "y"} - set(cols)
    if missing:
        raise UsageError(f"sinogram file lacks columns {sorted(missing)}")
    grid = grid_from_arrays(cols["k1"], cols["k2"], cols["s"], cols["phi"], cols["weight"])
    return SinogramData(grid, cols["y"], meta={"source": str(path)})
