"""
Zernike and Chebyshev bases on the disc
=======================================

The chord-average transform maps each Zernike function on the unit disc to a
scaled Chebyshev function on the detector.  This script evaluates both bases,
checks the mapping with Gauss-Legendre line quadrature and checks that each
basis is orthonormal under its own measure.
"""

import math

import numpy as np

from radon_spectral import BasisIndex, index_set, psi, radial_poly, zernike_phi
from radon_spectral.checks import orthonormality_error
from radon_spectral.radon import radon_line_integral

# The index set: degree m, angular frequency l with m - |l| even.
print("indices up to degree 2:", [tuple(i) for i in index_set(2)])

# Radial polynomials equal 1 at the rim and stay bounded by 1 inside.
r = np.linspace(0, 1, 6)
print("R_4^0(r) =", np.round(radial_poly((0, 4), r), 4))

# The Zernike function for (l, m) = (1, 3), evaluated at a few points.
idx = BasisIndex(1, 3)
print("phi_(1,3)(0.5, 0.3) =", zernike_phi(idx, 0.5, 0.3))

# The chord average of phi_(l,m) along the line at (s, phi) equals psi_(l,m) / sqrt(m + 1).
s, ang = 0.4, 1.1
re = radon_line_integral(lambda rr, tt: zernike_phi(idx, rr, tt).real, s, ang, nodes=128)
im = radon_line_integral(lambda rr, tt: zernike_phi(idx, rr, tt).imag, s, ang, nodes=128)
print("line quadrature :", complex(re, im))
print("closed form     :", psi(idx, s, ang) / math.sqrt(idx.m + 1))

# Both families are orthonormal; the deviation of the Gram matrices from the identity:
brain, detector = orthonormality_error(max_degree=8, nodes=120)
print(f"Gram deviation: brain {brain:.1e}, detector {detector:.1e}")
