"""Parallel-beam design on the detector space.

The detector space ``[0, 1] x [0, 2pi]`` is cut into ``q`` radial columns and
``p`` angular rows.  Each cell carries its mass under the probability measure
``d lambda = 2 pi^-2 sqrt(1 - s^2) ds dphi`` and a design point whose radial
coordinate zeroes the first weighted moment ``int (s - z) sqrt(1 - s^2) ds`` over
the cell.  Points are stored row-major with linear index ``k1 * p + k2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, UsageError

TWO_PI = 2.0 * math.pi
CSV_HEADER = "# radon-spectral v1"


def _chord_area(s):
    # antiderivative of sqrt(1 - s^2)
    s = np.asarray(s, dtype=float)
    return 0.5 * (s * np.sqrt(1.0 - s * s) + np.arcsin(s))


def _column_mass(s_lo, s_hi):
    return _chord_area(s_hi) - _chord_area(s_lo)


def _first_moment(s_lo, s_hi):
    # int_{s_lo}^{s_hi} s sqrt(1 - s^2) ds = (a^{3/2} - b^{3/2}) / 3 with a = 1 - s_lo^2, b = 1 - s_hi^2,
    # factored so narrow cells do not cancel.
    s_lo = np.asarray(s_lo, dtype=float)
    s_hi = np.asarray(s_hi, dtype=float)
    a = 1.0 - s_lo * s_lo
    b = 1.0 - s_hi * s_hi
    ra, rb = np.sqrt(a), np.sqrt(b)
    diff = (s_hi - s_lo) * (s_hi + s_lo)
    return diff * (a + ra * rb + b) / (ra + rb) / 3.0


def radial_design_point(s_lo, s_hi):
    """Radial coordinate ``z`` with ``int_{s_lo}^{s_hi} (s - z) sqrt(1 - s^2) ds = 0``.

    Vectorized over matching arrays of bounds.
    """
    s_lo = np.asarray(s_lo, dtype=float)
    s_hi = np.asarray(s_hi, dtype=float)
    if np.any(s_lo < 0.0) or np.any(s_hi > 1.0) or np.any(s_hi <= s_lo):
        raise DomainError("need 0 <= s_lo < s_hi <= 1")
    z = _first_moment(s_lo, s_hi) / _column_mass(s_lo, s_hi)
    return z if z.ndim else float(z)


@dataclass(frozen=True)
class GridCell:
    """Rectangular detector cell ``[s_lo, s_hi] x [phi_lo, phi_hi]`` at grid position ``(k1, k2)``."""

    k1: int
    k2: int
    s_lo: float
    s_hi: float
    phi_lo: float
    phi_hi: float

    @classmethod
    def at(cls, k1: int, k2: int, q: int, p: int) -> "GridCell":
        return cls(k1, k2, k1 / q, (k1 + 1) / q, TWO_PI * k2 / p, TWO_PI * (k2 + 1) / p)


def cell_weight(cell: GridCell) -> float:
    """Mass of ``cell`` under the detector probability measure."""
    return float(2.0 / math.pi**2 * (cell.phi_hi - cell.phi_lo) * _column_mass(cell.s_lo, cell.s_hi))


@dataclass(frozen=True, eq=False)
class DesignGrid:
    """Immutable ``q x p`` design: radial columns ``s``, angular rows ``phi``, cell weights.

    Attributes
    ----------
    q, p : int
        Number of radial columns and angular rows; ``n = p * q``.
    s_col : ndarray, shape (q,)
        Radial design coordinate per column.
    phi_row : ndarray, shape (p,)
        Angular design coordinate per row.
    weights : ndarray, shape (n,)
        Cell masses in row-major order.
    """

    q: int
    p: int
    s_col: np.ndarray
    phi_row: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.s_col.shape != (self.q,) or self.phi_row.shape != (self.p,):
            raise UsageError("coordinate arrays do not match the grid shape")
        if self.weights.shape != (self.n,):
            raise UsageError("weights must have length n = p * q")
        for a in (self.s_col, self.phi_row, self.weights):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.p * self.q

    @property
    def s(self) -> np.ndarray:
        """Radial coordinate of every design point (length ``n``)."""
        return np.repeat(self.s_col, self.p)

    @property
    def phi(self) -> np.ndarray:
        """Angular coordinate of every design point (length ``n``)."""
        return np.tile(self.phi_row, self.q)

    @property
    def column_weights(self) -> np.ndarray:
        return self.weights.reshape(self.q, self.p)

    def index(self, k1: int, k2: int) -> int:
        return k1 * self.p + k2

    def cell(self, k1: int, k2: int) -> GridCell:
        return GridCell.at(k1, k2, self.q, self.p)

    def to_csv(self, y: Optional[np.ndarray] = None, meta_line: Optional[str] = None) -> str:
        """CSV text with columns ``k1,k2,s,phi,weight`` (plus ``y`` when given)."""
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        if meta_line:
            buf.write("# " + meta_line + "\n")
        w = csv.writer(buf, lineterminator="\n")
        cols = ["k1", "k2", "s", "phi", "weight"] + (["y"] if y is not None else [])
        w.writerow(cols)
        s, phi = self.s, self.phi
        for k in range(self.n):
            row = [k // self.p, k % self.p, repr(float(s[k])), repr(float(phi[k])), repr(float(self.weights[k]))]
            if y is not None:
                row.append(repr(float(y[k])))
            w.writerow(row)
        return buf.getvalue()


def build_grid(q: int, ratio: float = TWO_PI) -> DesignGrid:
    """Design grid with ``q`` radial columns and ``p = round(ratio * q)`` angular rows.

    The default ratio ``2 pi`` gives the resolution-optimal ``p ~ 2 pi q``.
    """
    if q < 1:
        raise DomainError("q must be a positive integer")
    p = int(round(ratio * q))
    if p < 1:
        raise DomainError(f"ratio {ratio} gives no angular rows for q = {q}")
    edges = np.arange(q + 1) / q
    s_col = np.asarray(radial_design_point(edges[:-1], edges[1:]), dtype=float).reshape(q)
    phi_row = TWO_PI * (np.arange(p) + 0.5) / p
    col_w = 2.0 / math.pi**2 * (TWO_PI / p) * _column_mass(edges[:-1], edges[1:])
    weights = np.repeat(col_w, p)
    return DesignGrid(q, p, s_col, phi_row, weights)


def grid_from_arrays(k1, k2, s, phi, weight) -> DesignGrid:
    """Rebuild a grid from row-major per-point arrays (e.g. read back from CSV)."""
    k1 = np.asarray(k1, dtype=int)
    k2 = np.asarray(k2, dtype=int)
    q, p = int(k1.max()) + 1, int(k2.max()) + 1
    if len(k1) != p * q or np.any(k1 * p + k2 != np.arange(p * q)):
        raise UsageError("points are not a complete row-major q x p grid")
    s = np.asarray(s, dtype=float).reshape(q, p)
    phi = np.asarray(phi, dtype=float).reshape(q, p)
    return DesignGrid(q, p, s[:, 0].copy(), phi[0].copy(), np.asarray(weight, dtype=float).copy())
