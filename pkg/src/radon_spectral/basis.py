"""Singular functions of the normalized Radon transform.

Brain side: Zernike functions ``phi_(l,m)(r, theta) = sqrt(m+1) R_m^|l|(r) exp(i l theta)``
on the unit disc.  Detector side: ``psi_(l,m)(s, phi) = U_m(s) exp(i l phi)`` with
``U_m`` the Chebyshev polynomial of the second kind.

All evaluators are vectorized over their coordinate arguments.  Point types are
NamedTuples, so ``zernike_phi(idx, *BrainPoint(r, theta))`` works as expected.

Radial polynomials are evaluated through the Jacobi representation
``R_m^a(r) = r^a P_k^{(0, a)}(2 r^2 - 1)`` with ``k = (m - a) / 2`` and its
three-term recurrence.  The alternating factorial sum is exact in rational
arithmetic but loses every significant digit in floating point well before
``m = 50``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Iterator, NamedTuple, Union

import numpy as np

from .errors import CapabilityError, DomainError

DEFAULT_DEGREE_CAP = 50
DEFAULT_MAX_DERIVATIVE_ORDER = 4

__all__ = [
    "DEFAULT_DEGREE_CAP",
    "DEFAULT_MAX_DERIVATIVE_ORDER",
    "BasisIndex",
    "BrainPoint",
    "DetectorPoint",
    "as_index",
    "index_set",
    "radial_poly",
    "radial_poly_derivative",
    "radial_derivative_terms",
    "zernike_phi",
    "chebyshev_T",
    "chebyshev_U",
    "chebyshev_U_table",
    "chebyshev_U_derivative",
    "psi",
]


@total_ordering
@dataclass(frozen=True)
class BasisIndex:
    """Index ``(l, m)`` of one singular pair; requires ``|l| <= m`` and ``m - |l|`` even.

    Indices sort by ``(m, l)``.
    """

    l: int
    m: int

    def __post_init__(self):
        l, m = int(self.l), int(self.m)
        if m < 0 or abs(l) > m or (m - abs(l)) % 2:
            raise DomainError(f"({self.l}, {self.m}) is not a valid basis index")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "m", m)

    @staticmethod
    def is_valid(l: int, m: int) -> bool:
        return m >= 0 and abs(l) <= m and (m - abs(l)) % 2 == 0

    def __iter__(self) -> Iterator[int]:
        yield self.l
        yield self.m

    def __lt__(self, other):
        if not isinstance(other, BasisIndex):
            return NotImplemented
        return (self.m, self.l) < (other.m, other.l)

    def conjugate(self) -> "BasisIndex":
        return BasisIndex(-self.l, self.m)

    def __repr__(self):
        return f"BasisIndex({self.l}, {self.m})"


IndexLike = Union[BasisIndex, tuple]


class BrainPoint(NamedTuple):
    """Polar coordinates ``(r, theta)`` on the unit disc."""

    r: float
    theta: float


class DetectorPoint(NamedTuple):
    """Chord coordinates: offset ``s`` from the origin and inclination ``phi``."""

    s: float
    phi: float


def as_index(idx: IndexLike) -> BasisIndex:
    if isinstance(idx, BasisIndex):
        return idx
    l, m = idx
    return BasisIndex(l, m)


def index_set(max_degree: int) -> list[BasisIndex]:
    """All basis indices with ``m <= max_degree``, sorted by ``(m, l)``."""
    return [BasisIndex(l, m) for m in range(max_degree + 1) for l in range(-m, m + 1, 2)]


def _check_degree(m: int, cap: int):
    if m > cap:
        raise CapabilityError(f"degree {m} exceeds the degree cap {cap}")


def _check_order(order: int, max_order: int):
    if order < 0:
        raise DomainError("derivative order must be nonnegative")
    if order > max_order:
        raise CapabilityError(f"derivative order {order} exceeds the cap {max_order}")


# ---------------------------------------------------------------------------
# radial polynomials
# ---------------------------------------------------------------------------


def _radial_family(a: int, kmax: int, r) -> np.ndarray:
    """Rows ``R_{a+2k}^a(r)`` for ``k = 0..kmax``; shape ``(kmax + 1,) + r.shape``."""
    r = np.asarray(r, dtype=float)
    x = 2.0 * r * r - 1.0
    out = np.empty((kmax + 1,) + r.shape)
    b = float(a)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + 0.5 * (b + 2.0) * (x - 1.0)
    for n in range(2, kmax + 1):
        c0 = 2.0 * n * (n + b) * (2 * n + b - 2)
        c1 = (2 * n + b - 1) * ((2 * n + b) * (2 * n + b - 2) * x - b * b)
        c2 = 2.0 * (n - 1) * (n + b - 1) * (2 * n + b)
        out[n] = (c1 * out[n - 1] - c2 * out[n - 2]) / c0
    if a:
        out *= r**a
    return out


def radial_table(a: int, max_degree: int, r) -> np.ndarray:
    """Radial polynomials ``R_m^a(r)`` for ``m = a, a+2, ..., <= max_degree``."""
    if max_degree < a:
        return np.empty((0,) + np.shape(r))
    return _radial_family(a, (max_degree - a) // 2, r)


def radial_poly(idx: IndexLike, r, cap: int = DEFAULT_DEGREE_CAP):
    """Radial polynomial ``R_m^{|l|}(r)``.

    Parameters
    ----------
    idx : BasisIndex or (l, m)
    r : float or array_like
        Radius, nominally in ``[0, 1]``.
    cap : int, optional
        Degree cap; ``m > cap`` raises :class:`CapabilityError`.
    """
    idx = as_index(idx)
    _check_degree(idx.m, cap)
    a = abs(idx.l)
    return _radial_family(a, (idx.m - a) // 2, r)[-1]


@lru_cache(maxsize=None)
def radial_derivative_terms(a: int, m: int, order: int) -> tuple:
    """Expansion of ``d^order/dr^order R_m^a`` in lower-degree radial polynomials.

    Returns a tuple of ``((a', m'), coefficient)`` pairs with integer
    coefficients, built by repeated application of

        d/dr R_m^a = sum_j (m - 2j) R_{m-1-2j}^{|a-1|} + sum_j (m - 2j) R_{m-1-2j}^{a+1}.
    """
    if order == 0:
        return (((a, m), 1),)
    acc: dict[tuple[int, int], int] = {}
    for (a1, m1), c1 in radial_derivative_terms(a, m, order - 1):
        for a2 in (abs(a1 - 1), a1 + 1):
            for j in range((m1 - 1 - a2) // 2 + 1):
                key = (a2, m1 - 1 - 2 * j)
                acc[key] = acc.get(key, 0) + c1 * (m1 - 2 * j)
    return tuple(sorted((k, v) for k, v in acc.items() if v))


def _eval_radial_terms(terms, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    by_a: dict[int, list] = {}
    for (a, m), c in terms:
        by_a.setdefault(a, []).append((m, c))
    for a, items in by_a.items():
        table = radial_table(a, max(m for m, _ in items), r)
        for m, c in items:
            out = out + c * table[(m - a) // 2]
    return out


def radial_poly_derivative(
    idx: IndexLike,
    order: int,
    r,
    cap: int = DEFAULT_DEGREE_CAP,
    max_order: int = DEFAULT_MAX_DERIVATIVE_ORDER,
):
    """``order``-th derivative of ``R_m^{|l|}`` in ``r``, via the lowering recurrence."""
    idx = as_index(idx)
    _check_degree(idx.m, cap)
    _check_order(order, max_order)
    terms = radial_derivative_terms(abs(idx.l), idx.m, order)
    return _eval_radial_terms(terms, r)


def zernike_phi(idx: IndexLike, r, theta, cap: int = DEFAULT_DEGREE_CAP, strict: bool = True):
    """Orthonormal Zernike function ``sqrt(m+1) R_m^{|l|}(r) exp(i l theta)``.

    With ``strict=False`` an index outside the admissible set gives 0 instead of
    raising :class:`DomainError`.
    """
    if not strict and not isinstance(idx, BasisIndex) and not BasisIndex.is_valid(*idx):
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(theta)).shape, dtype=complex)
    idx = as_index(idx)
    rad = radial_poly(idx, r, cap=cap)
    return np.sqrt(idx.m + 1.0) * rad * np.exp(1j * idx.l * np.asarray(theta, dtype=float))


# ---------------------------------------------------------------------------
# Chebyshev polynomials
# ---------------------------------------------------------------------------


def chebyshev_U_table(max_degree: int, s) -> np.ndarray:
    """``U_0(s), ..., U_max_degree(s)`` stacked along the first axis."""
    s = np.asarray(s, dtype=float)
    out = np.empty((max_degree + 1,) + s.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = 2.0 * s
    for k in range(2, max_degree + 1):
        out[k] = 2.0 * s * out[k - 1] - out[k - 2]
    return out


def chebyshev_T_table(max_degree: int, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.empty((max_degree + 1,) + s.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = s
    for k in range(2, max_degree + 1):
        out[k] = 2.0 * s * out[k - 1] - out[k - 2]
    return out


def chebyshev_U(m: int, s):
    """Chebyshev polynomial of the second kind, ``U_m(s)``."""
    if m < 0:
        raise DomainError("degree must be nonnegative")
    return chebyshev_U_table(m, s)[m]


def chebyshev_T(m: int, s):
    """Chebyshev polynomial of the first kind, ``T_m(s)``."""
    if m < 0:
        raise DomainError("degree must be nonnegative")
    return chebyshev_T_table(m, s)[m]


def _U_in_T(n: int) -> list[int]:
    # U_n = 2 * sum_{0 < j <= n, n-j even} T_j + [n even] T_0
    c = [0] * (n + 1)
    for j in range(n % 2, n + 1, 2):
        c[j] = 2 if j else 1
    return c


def _T_series_derivative(coeffs: list[int]) -> list[int]:
    # T_j' = j U_{j-1}
    out = [0] * max(len(coeffs) - 1, 1)
    for j, a in enumerate(coeffs):
        if j == 0 or a == 0:
            continue
        for i, u in enumerate(_U_in_T(j - 1)):
            out[i] += a * j * u
    return out


@lru_cache(maxsize=None)
def _U_derivative_T_coeffs(m: int, order: int) -> tuple:
    if order == 0:
        return tuple(_U_in_T(m))
    if m == 0:
        return (0,)
    # d/ds U_m = sum'_{j <= m-1, m-j odd} ((m+1)^2 - j^2) T_j, with the j = 0 term halved
    c = [0] * m
    for j in range((m - 1) % 2, m, 2):
        c[j] = (m + 1) ** 2 - j * j
    if (m - 1) % 2 == 0:
        c[0] //= 2
    for _ in range(order - 1):
        c = _T_series_derivative(c)
    return tuple(c)


def chebyshev_U_derivative(m: int, order: int, s, max_order: int = DEFAULT_MAX_DERIVATIVE_ORDER):
    """``order``-th derivative of ``U_m`` from its expansion in first-kind polynomials."""
    if m < 0:
        raise DomainError("degree must be nonnegative")
    _check_order(order, max_order)
    coeffs = np.asarray(_U_derivative_T_coeffs(m, order), dtype=float)
    table = chebyshev_T_table(len(coeffs) - 1, s)
    return np.tensordot(coeffs, table, axes=1)


def psi(idx: IndexLike, s, phi, cap: int = DEFAULT_DEGREE_CAP, strict: bool = True):
    """Detector-side singular function ``U_m(s) exp(i l phi)``."""
    if not strict and not isinstance(idx, BasisIndex) and not BasisIndex.is_valid(*idx):
        return np.zeros(np.broadcast(np.asarray(s), np.asarray(phi)).shape, dtype=complex)
    idx = as_index(idx)
    _check_degree(idx.m, cap)
    return chebyshev_U(idx.m, s) * np.exp(1j * idx.l * np.asarray(phi, dtype=float))
