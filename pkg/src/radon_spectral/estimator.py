"""Spectral cut-off estimation of the attenuation profile from noisy chord averages.

Each detector coefficient is estimated by the weighted design sum
``R_hat(l, m) = sum_k w_k conj(psi_(l,m)(z_k)) Y_k``, and the image is rebuilt
from the inverse SVD with the series damped by ``Lambda(m / t)``; the hard
cut-off is ``Lambda = 1_[0, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .basis import DEFAULT_DEGREE_CAP, as_index, chebyshev_U_table, index_set
from .design import DesignGrid
from .errors import CapabilityError, ConsistencyError, DomainError, UsageError
from .radon import BRAIN, DETECTOR, CoefficientField, evaluate_expansion, svd_forward

IMAG_TOLERANCE = 1e-10

__all__ = [
    "BandwidthRule",
    "FilterSpec",
    "HARD_CUTOFF",
    "SMOOTH_TAPER",
    "SinogramData",
    "estimate_coefficient",
    "estimate_coefficients",
    "default_bandwidth",
    "spectral_estimate",
    "estimate_at",
    "estimator_radon_trace",
    "detector_trace",
    "ellipsoid_norm",
    "oracle_bandwidth",
]


@dataclass(frozen=True)
class BandwidthRule:
    """Rate-balancing truncation rule ``t = scale * (n / log n)^(1 / (2 (v + 3)))``."""

    v: float = 5.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise DomainError("bandwidth scale must be positive")


def _indicator(x):
    x = np.asarray(x, dtype=float)
    return ((x >= 0.0) & (x <= 1.0)).astype(float)


def _linear_taper(x):
    return np.clip(2.0 - 2.0 * np.asarray(x, dtype=float), 0.0, 1.0)


@dataclass(frozen=True)
class FilterSpec:
    """Spectral filter ``Lambda`` with values in ``[0, 1]`` and support in ``[0, support]``."""

    kind: str = "hard_cutoff"
    taper: Callable = _indicator
    support: float = 1.0

    def __post_init__(self):
        if self.kind not in ("hard_cutoff", "smooth"):
            raise UsageError(f"unknown filter kind {self.kind!r}")
        if self.kind == "hard_cutoff" and self.taper is not _indicator:
            raise UsageError("the hard cut-off filter is the indicator of [0, 1]")

    @classmethod
    def smooth(cls, taper: Callable = _linear_taper, support: float = 1.0) -> "FilterSpec":
        return cls("smooth", taper, support)

    def factors(self, t: int, max_degree: int) -> np.ndarray:
        """``Lambda(m / t)`` for ``m = 0..max_degree``."""
        lam = np.asarray(self.taper(np.arange(max_degree + 1) / t), dtype=float)
        if np.any(lam < 0.0) or np.any(lam > 1.0):
            raise DomainError("filter values must lie in [0, 1]")
        return lam

    @classmethod
    def from_name(cls, name: str) -> "FilterSpec":
        if name in ("hard", "hard_cutoff"):
            return HARD_CUTOFF
        if name == "smooth":
            return SMOOTH_TAPER
        raise UsageError(f"unknown filter {name!r}")


HARD_CUTOFF = FilterSpec()
SMOOTH_TAPER = FilterSpec.smooth()


@dataclass(frozen=True, eq=False)
class SinogramData:
    """Observations ``Y_k`` aligned with the row-major design grid.

    ``errors`` holds the true noise realization when the data were simulated;
    it is only used by diagnostics.
    """

    grid: DesignGrid
    y: np.ndarray
    meta: dict = field(default_factory=dict)
    errors: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.shape != (self.grid.n,):
            raise UsageError(f"expected {self.grid.n} observations, got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise DomainError("observations must be finite")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)


def estimate_coefficients(data: SinogramData, max_degree: int, cap: int = DEFAULT_DEGREE_CAP) -> CoefficientField:
    """Estimated detector coefficients for every index with ``m <= max_degree``."""
    if max_degree > cap:
        raise CapabilityError(f"degree {max_degree} exceeds the degree cap {cap}")
    grid = data.grid
    ls = np.arange(-max_degree, max_degree + 1)
    wy = (grid.weights * data.y).reshape(grid.q, grid.p)
    ang = wy @ np.exp(-1j * np.outer(grid.phi_row, ls))
    coef = chebyshev_U_table(max_degree, grid.s_col) @ ang
    entries = {idx: coef[idx.m, idx.l + max_degree] for idx in index_set(max_degree)}
    return CoefficientField(entries, space=DETECTOR, cap=cap)


def estimate_coefficient(data: SinogramData, idx) -> complex:
    """``sum_k w_k conj(psi_idx(z_k)) Y_k``."""
    idx = as_index(idx)
    grid = data.grid
    u = chebyshev_U_table(idx.m, grid.s)[idx.m]
    return complex(np.sum(grid.weights * u * np.exp(-1j * idx.l * grid.phi) * data.y))


def default_bandwidth(n: int, rule: BandwidthRule = BandwidthRule(), cap: int = DEFAULT_DEGREE_CAP) -> int:
    """Truncation level ``max(1, floor(scale * (n / log n)^(1 / (2 (v + 3)))))``, capped."""
    if n < 2:
        raise DomainError("the bandwidth rule needs n >= 2")
    if rule.v < 5:
        raise DomainError("the default rule assumes smoothness v >= 5")
    t = math.floor(rule.scale * (n / math.log(n)) ** (1.0 / (2.0 * (rule.v + 3.0))))
    return int(min(max(1, t), cap))


def _filtered_degree(t: int, filt: FilterSpec, cap: int) -> int:
    if t < 1:
        raise DomainError("truncation level must be a positive integer")
    if t > cap:
        raise CapabilityError(f"truncation level {t} exceeds the degree cap {cap}")
    top = int(math.floor(filt.support * t))
    if top > cap:
        raise CapabilityError(f"filter support reaches degree {top} beyond the cap {cap}")
    return top


def spectral_estimate(
    data: SinogramData, t: int, filt: FilterSpec = HARD_CUTOFF, cap: int = DEFAULT_DEGREE_CAP
) -> CoefficientField:
    """Brain coefficients ``sqrt(m+1) Lambda(m/t) R_hat(l, m)`` of the estimator.

    Only degrees with ``Lambda(m/t) > 0`` are kept.
    """
    top = _filtered_degree(t, filt, cap)
    lam = filt.factors(t, top)
    r_hat = estimate_coefficients(data, top, cap=cap)
    entries = {
        idx: np.sqrt(idx.m + 1.0) * lam[idx.m] * c for idx, c in r_hat.items() if lam[idx.m] > 0.0
    }
    return CoefficientField(entries, space=BRAIN, cap=cap)


def _real_or_raise(values: np.ndarray) -> np.ndarray:
    if values.size and np.max(np.abs(values.imag)) > IMAG_TOLERANCE:
        raise ConsistencyError("estimate has a non-negligible imaginary part; conjugate symmetry is broken")
    return values.real


def estimate_at(
    data: SinogramData, t: int, r, theta, filt: FilterSpec = HARD_CUTOFF, cap: int = DEFAULT_DEGREE_CAP
) -> np.ndarray:
    """Real values of the estimate at polar points ``(r, theta)``."""
    g_hat = spectral_estimate(data, t, filt, cap=cap)
    return _real_or_raise(evaluate_expansion(g_hat, r, theta))


def detector_trace(c: CoefficientField, grid: DesignGrid) -> np.ndarray:
    """Real values of a detector expansion at every design point (row-major, length ``n``)."""
    if c.space != DETECTOR:
        raise UsageError("detector_trace needs a detector-space field")
    if not len(c):
        return np.zeros(grid.n)
    top = c.max_degree
    ls = np.arange(-top, top + 1)
    coef = np.zeros((top + 1, 2 * top + 1), dtype=complex)
    for idx, v in c.items():
        coef[idx.m, idx.l + top] = v
    radial = chebyshev_U_table(top, grid.s_col).T @ coef
    vals = radial @ np.exp(1j * np.outer(ls, grid.phi_row))
    return _real_or_raise(vals.ravel())


def estimator_radon_trace(
    data: SinogramData,
    t: int,
    filt: FilterSpec = HARD_CUTOFF,
    grid: Optional[DesignGrid] = None,
    cap: int = DEFAULT_DEGREE_CAP,
) -> np.ndarray:
    """Transform of the estimate at the design points, computed through the SVD."""
    g_hat = spectral_estimate(data, t, filt, cap=cap)
    return detector_trace(svd_forward(g_hat), data.grid if grid is None else grid)


def ellipsoid_norm(c: CoefficientField, tau: float) -> float:
    """Weighted coefficient sum ``sum m^tau |c(l, m)|`` of a detector field."""
    if c.space != DETECTOR:
        raise UsageError("ellipsoid_norm is defined on detector coefficients")
    return float(sum(idx.m**tau * abs(v) for idx, v in c.items()))


def oracle_bandwidth(
    data: SinogramData,
    truth: CoefficientField,
    r,
    theta,
    t_max: Optional[int] = None,
    filt: FilterSpec = HARD_CUTOFF,
    cap: int = DEFAULT_DEGREE_CAP,
) -> tuple[int, float]:
    """Truncation level minimizing the true sup-error over the points; simulation only."""
    truth_vals = evaluate_expansion(truth, r, theta).real
    best = None
    for t in range(1, (t_max or cap) + 1):
        err = float(np.max(np.abs(estimate_at(data, t, r, theta, filt, cap=cap) - truth_vals)))
        if best is None or err < best[1]:
            best = (t, err)
    return best
