"""Numerical self-checks of the singular system (used by ``selfcheck`` and the tests)."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import roots_legendre

from .basis import index_set, psi, zernike_phi
from .radon import radon_line_integral


def svd_identity_error(max_degree: int = 10, n_points: int = 20, s_max: float = 0.95, nodes: int = 128,
                       seed: int = 0) -> float:
    """Largest deviation between chord averages of Zernike functions and ``psi / sqrt(m+1)``.

    Real and imaginary parts are transformed separately at ``n_points`` random
    detector points with ``s <= s_max``.
    """
    rng = np.random.default_rng(seed)
    s = rng.uniform(0.0, s_max, n_points)
    phi = rng.uniform(0.0, 2.0 * math.pi, n_points)
    worst = 0.0
    for idx in index_set(max_degree):
        expected = psi(idx, s, phi) / math.sqrt(idx.m + 1.0)
        re = radon_line_integral(lambda r, t: zernike_phi(idx, r, t).real, s, phi, nodes)
        im = radon_line_integral(lambda r, t: zernike_phi(idx, r, t).imag, s, phi, nodes)
        worst = max(worst, float(np.max(np.abs(re + 1j * im - expected))))
    return worst


def _gram(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (values * weights) @ values.conj().T


def brain_gram(max_degree: int = 10, nodes: int = 200) -> np.ndarray:
    """Gram matrix of the Zernike functions under ``d mu = r dr dtheta / pi``."""
    x, w = roots_legendre(nodes)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w * r / math.pi
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    wt = np.full(nodes, 2.0 * math.pi / nodes)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    weights = np.outer(wr, wt).ravel()
    vals = np.array([zernike_phi(idx, rr.ravel(), tt.ravel()) for idx in index_set(max_degree)])
    return _gram(vals, weights)


def detector_gram(max_degree: int = 10, nodes: int = 200) -> np.ndarray:
    """Gram matrix of the Chebyshev-based functions under ``d lambda = 2 pi^-2 sqrt(1-s^2) ds dphi``.

    Uses ``s = cos(u)`` so the square-root weight becomes the smooth ``sin(u)^2``.
    """
    x, w = roots_legendre(nodes)
    u = 0.25 * math.pi * (x + 1.0)
    s = np.cos(u)
    ws = 0.25 * math.pi * w * np.sin(u) ** 2 * 2.0 / math.pi**2
    phi = 2.0 * math.pi * np.arange(nodes) / nodes
    wp = np.full(nodes, 2.0 * math.pi / nodes)
    ss, pp = np.meshgrid(s, phi, indexing="ij")
    weights = np.outer(ws, wp).ravel()
    vals = np.array([psi(idx, ss.ravel(), pp.ravel()) for idx in index_set(max_degree)])
    return _gram(vals, weights)


def orthonormality_error(max_degree: int = 10, nodes: int = 200) -> tuple[float, float]:
    """Entrywise deviation from the identity of both Gram matrices."""
    eye = np.eye(len(index_set(max_degree)))
    b = float(np.max(np.abs(brain_gram(max_degree, nodes) - eye)))
    d = float(np.max(np.abs(detector_gram(max_degree, nodes) - eye)))
    return b, d


def selfcheck(tol_svd: float = 1e-6, tol_gram: float = 1e-8) -> list[tuple[str, float, float, bool]]:
    """Run both suites; rows of ``(name, value, tolerance, passed)``."""
    svd = svd_identity_error()
    b, d = orthonormality_error()
    return [
        ("svd_identity", svd, tol_svd, svd <= tol_svd),
        ("orthonormality_brain", b, tol_gram, b <= tol_gram),
        ("orthonormality_detector", d, tol_gram, d <= tol_gram),
    ]
