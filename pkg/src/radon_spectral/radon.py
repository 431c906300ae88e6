"""Normalized Radon transform: chord averages and the diagonal SVD action.

The transform maps a function on the unit disc to its average along the chord
with offset ``s`` and inclination ``phi``.  In the singular bases it is the
diagonal scaling ``<g, phi_(l,m)> -> <g, phi_(l,m)> / sqrt(m+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.special import roots_legendre

from .basis import (
    DEFAULT_DEGREE_CAP,
    DEFAULT_MAX_DERIVATIVE_ORDER,
    BasisIndex,
    _check_order,
    _eval_radial_terms,
    as_index,
    chebyshev_U_table,
    radial_derivative_terms,
    radial_table,
)
from .errors import CapabilityError, DomainError, UsageError

BRAIN = "brain"
DETECTOR = "detector"
DEFAULT_CHORD_NODES = 64

__all__ = [
    "BRAIN",
    "DETECTOR",
    "DEFAULT_CHORD_NODES",
    "CoefficientField",
    "FieldFunction",
    "radon_line_integral",
    "svd_forward",
    "svd_inverse",
    "evaluate_expansion",
    "evaluate_expansion_real",
    "expansion_derivative",
]


@dataclass(frozen=True)
class CoefficientField:
    """Finite expansion coefficients in the brain (``<g, phi>``) or detector (``<Rg, psi>``) basis.

    Parameters
    ----------
    entries : mapping
        ``BasisIndex`` (or ``(l, m)`` tuple) to complex coefficient.
    space : {"brain", "detector"}
    cap : int
        Maximum admissible degree.
    """

    entries: Mapping[BasisIndex, complex] = field(default_factory=dict)
    space: str = BRAIN
    cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if self.space not in (BRAIN, DETECTOR):
            raise UsageError(f"unknown space tag {self.space!r}")
        clean = {}
        for k, v in self.entries.items():
            idx = as_index(k)
            if idx.m > self.cap:
                raise CapabilityError(f"index {idx} exceeds the degree cap {self.cap}")
            clean[idx] = complex(v)
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, idx) -> complex:
        return self.entries.get(as_index(idx), 0j)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    @property
    def max_degree(self) -> int:
        return max((idx.m for idx in self.entries), default=-1)

    def is_real_symmetric(self, tol: float = 1e-12) -> bool:
        """True when ``c(-l, m) == conj(c(l, m))`` for every stored index."""
        for idx, c in self.entries.items():
            if abs(self[idx.conjugate()] - np.conj(c)) > tol * max(1.0, abs(c)):
                return False
        return True

    def with_entries(self, entries) -> "CoefficientField":
        return CoefficientField(entries, space=self.space, cap=self.cap)

    def __sub__(self, other: "CoefficientField") -> "CoefficientField":
        if other.space != self.space:
            raise UsageError("cannot combine fields from different spaces")
        keys = set(self.entries) | set(other.entries)
        return self.with_entries({k: self[k] - other[k] for k in keys})

    def by_l(self) -> dict[int, dict[int, complex]]:
        """Entries grouped as ``{l: {m: coefficient}}``."""
        out: dict[int, dict[int, complex]] = {}
        for idx, c in self.entries.items():
            out.setdefault(idx.l, {})[idx.m] = c
        return out


class FieldFunction:
    """A real function on the unit disc, called as ``g(r, theta)`` with array arguments.

    When built from a :class:`CoefficientField` it also carries the expansion.
    """

    def __init__(self, func: Callable, expansion: Optional[CoefficientField] = None):
        self._func = func
        self.expansion = expansion

    @classmethod
    def from_field(cls, c: CoefficientField) -> "FieldFunction":
        if c.space != BRAIN:
            raise UsageError("a field function needs brain-space coefficients")
        return cls(lambda r, theta: evaluate_expansion(c, r, theta).real, expansion=c)

    def __call__(self, r, theta):
        return self._func(r, theta)


@lru_cache(maxsize=32)
def _gauss_legendre(nodes: int):
    x, w = roots_legendre(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def radon_line_integral(g: Callable, s, phi, nodes: int = DEFAULT_CHORD_NODES):
    """Average of ``g`` over the chord with offset ``s`` and inclination ``phi``.

    Gauss-Legendre quadrature on the chord; the normalization is folded into the
    affine node map, so ``s = 1`` returns ``g`` at the tangency point.

    Parameters
    ----------
    g : callable
        ``g(r, theta)`` accepting arrays.
    s, phi : float or array_like
        Detector coordinates, broadcast against each other.
    nodes : int
        Number of quadrature nodes (``>= 2``).
    """
    if nodes < 2:
        raise DomainError("at least two quadrature nodes are required")
    s, phi = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(phi, dtype=float))
    if np.any(s > 1.0) or np.any(s < 0.0):
        raise DomainError("detector offset must lie in [0, 1]")
    x, w = _gauss_legendre(nodes)
    half = np.sqrt(np.clip(1.0 - s * s, 0.0, None))[..., None]
    t = half * x
    c, sn = np.cos(phi)[..., None], np.sin(phi)[..., None]
    xs = s[..., None] * c - t * sn
    ys = s[..., None] * sn + t * c
    r = np.minimum(np.hypot(xs, ys), 1.0)
    theta = np.mod(np.arctan2(ys, xs), 2.0 * np.pi)
    vals = np.asarray(g(r, theta))
    return 0.5 * np.sum(vals * w, axis=-1)


def _require(c: CoefficientField, space: str):
    if c.space != space:
        raise UsageError(f"expected a {space}-space field, got {c.space}")


def svd_forward(c: CoefficientField) -> CoefficientField:
    """Brain coefficients ``<g, phi>`` to detector coefficients ``<Rg, psi>``."""
    _require(c, BRAIN)
    return CoefficientField(
        {idx: v / np.sqrt(idx.m + 1.0) for idx, v in c.items()}, space=DETECTOR, cap=c.cap
    )


def svd_inverse(c: CoefficientField) -> CoefficientField:
    """Detector coefficients back to brain coefficients (exact left inverse of ``svd_forward``)."""
    _require(c, DETECTOR)
    return CoefficientField(
        {idx: v * np.sqrt(idx.m + 1.0) for idx, v in c.items()}, space=BRAIN, cap=c.cap
    )


def _radial_part(c: CoefficientField, l: int, ms: dict, x) -> np.ndarray:
    a = abs(l)
    if c.space == BRAIN:
        table = radial_table(a, max(ms), x)
        return sum(v * np.sqrt(m + 1.0) * table[(m - a) // 2] for m, v in ms.items())
    table = chebyshev_U_table(max(ms), x)
    return sum(v * table[m] for m, v in ms.items())


def evaluate_expansion(c: CoefficientField, x, angle):
    """Evaluate ``sum c(l,m) basis_(l,m)(x, angle)``.

    Uses Zernike functions for brain fields (``x = r``) and Chebyshev-based
    functions for detector fields (``x = s``).
    """
    x, angle = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(angle, dtype=float))
    out = np.zeros(x.shape, dtype=complex)
    for l, ms in c.by_l().items():
        out += _radial_part(c, l, ms, x) * np.exp(1j * l * angle)
    return out


def evaluate_expansion_real(c: CoefficientField, x, angle):
    """Real-valued evaluation of a conjugate-symmetric field; imaginary residue is dropped."""
    if not c.is_real_symmetric():
        raise UsageError("real evaluation requires a conjugate-symmetric field")
    return evaluate_expansion(c, x, angle).real


def expansion_derivative(
    c: CoefficientField,
    alpha: int,
    beta: int,
    r,
    theta,
    max_order: int = DEFAULT_MAX_DERIVATIVE_ORDER,
):
    """Mixed derivative ``d^alpha/dr^alpha d^beta/dtheta^beta`` of a brain expansion."""
    _require(c, BRAIN)
    if alpha < 0 or beta < 0:
        raise DomainError("derivative orders must be nonnegative")
    if alpha + beta > max_order:
        raise CapabilityError(f"total order {alpha + beta} exceeds the cap {max_order}")
    _check_order(alpha, max_order)
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    out = np.zeros(r.shape, dtype=complex)
    for idx, v in c.items():
        terms = radial_derivative_terms(abs(idx.l), idx.m, alpha)
        rad = _eval_radial_terms(terms, r)
        out += v * np.sqrt(idx.m + 1.0) * rad * (1j * idx.l) ** beta * np.exp(1j * idx.l * theta)
    return out
