import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radon_spectral.basis import (
    BasisIndex,
    BrainPoint,
    DetectorPoint,
    chebyshev_T,
    chebyshev_U,
    chebyshev_U_derivative,
    index_set,
    psi,
    radial_poly,
    radial_poly_derivative,
    zernike_phi,
)
from radon_spectral.errors import CapabilityError, DomainError


def radial_factorial_sum(l, m, r):
    """Exact rational evaluation of the alternating factorial sum."""
    a = abs(l)
    r = Fraction(r)
    total = Fraction(0)
    for j in range((m - a) // 2 + 1):
        num = math.factorial(m - j)
        den = math.factorial(j) * math.factorial((m + a) // 2 - j) * math.factorial((m - a) // 2 - j)
        total += (-1) ** j * Fraction(num, den) * r ** (m - 2 * j)
    return float(total)


indices = st.integers(0, 20).flatmap(
    lambda m: st.sampled_from([BasisIndex(l, m) for l in range(-m, m + 1, 2)])
)


class TestBasisIndex:
    def test_invalid_parity(self):
        with pytest.raises(DomainError):
            BasisIndex(1, 2)

    def test_invalid_magnitude(self):
        with pytest.raises(DomainError):
            BasisIndex(3, 1)

    def test_ordering_by_degree_then_l(self):
        assert sorted([BasisIndex(1, 1), BasisIndex(0, 2), BasisIndex(-1, 1)]) == [
            BasisIndex(-1, 1), BasisIndex(1, 1), BasisIndex(0, 2)
        ]

    def test_unpacks(self):
        l, m = BasisIndex(-2, 4)
        assert (l, m) == (-2, 4)


class TestIndexSet:
    def test_degree_zero(self):
        assert index_set(0) == [BasisIndex(0, 0)]

    def test_degree_one(self):
        assert index_set(1) == [BasisIndex(0, 0), BasisIndex(-1, 1), BasisIndex(1, 1)]

    def test_degree_two_count(self):
        assert len(index_set(2)) == 6

    @pytest.mark.parametrize("M", [0, 3, 7, 12])
    def test_count_and_sorted(self, M):
        idx = index_set(M)
        assert len(idx) == sum(m + 1 for m in range(M + 1))
        assert idx == sorted(idx)


class TestRadialPoly:
    def test_constant(self):
        assert radial_poly((0, 0), 0.7) == 1.0

    def test_defocus(self):
        assert radial_poly((0, 2), 0.5) == pytest.approx(-0.5, abs=1e-15)

    def test_tilt(self):
        assert radial_poly((1, 1), 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_matches_factorial_sum(self):
        rs = [0.0, 0.13, 0.5, 0.77, 0.999, 1.0]
        for idx in index_set(30):
            for r in rs:
                exact = radial_factorial_sum(idx.l, idx.m, r)
                assert radial_poly(idx, r) == pytest.approx(exact, abs=1e-11), (idx, r)

    def test_invalid_index(self):
        with pytest.raises(DomainError):
            radial_poly((1, 4), 0.5)

    def test_degree_cap(self):
        with pytest.raises(CapabilityError):
            radial_poly((0, 52), 0.5)
        assert np.isfinite(radial_poly((0, 52), 0.5, cap=60))

    def test_finite_at_cap(self):
        r = np.linspace(0, 1, 101)
        for l in range(0, 51, 5):
            m = 50 if (50 - l) % 2 == 0 else 49
            assert np.all(np.isfinite(radial_poly((l, m), r)))

    @settings(max_examples=60, deadline=None)
    @given(indices)
    def test_sup_is_one_at_boundary(self, idx):
        r = np.linspace(0, 1, 801)
        vals = radial_poly(idx, r)
        assert np.max(np.abs(vals)) <= 1 + 1e-12
        assert vals[-1] == pytest.approx(1.0, abs=1e-12)


class TestRadialDerivative:
    def test_constant(self):
        assert radial_poly_derivative((0, 0), 1, 0.4) == 0.0

    def test_defocus_slope(self):
        # d/dr (2r^2 - 1) at 0.5
        assert radial_poly_derivative((0, 2), 1, 0.5) == pytest.approx(2.0, abs=1e-14)

    def test_second_derivative_bound(self):
        r = np.linspace(0, 1, 201)
        assert np.max(np.abs(radial_poly_derivative((1, 3), 2, r))) <= 81

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_finite_differences(self, order):
        h = 1e-5
        r = np.linspace(0.05, 0.95, 13)
        for idx in index_set(12):
            fd = (radial_poly_derivative(idx, order - 1, r + h) - radial_poly_derivative(idx, order - 1, r - h)) / (2 * h)
            ex = radial_poly_derivative(idx, order, r)
            scale = np.maximum(np.abs(ex), 1.0)
            assert np.all(np.abs(fd - ex) <= 1e-6 * scale * max(idx.m, 1) ** (2 * order)), (idx, order)

    def test_first_derivative_tight(self):
        h = 1e-6
        r = np.linspace(0.05, 0.95, 13)
        for idx in index_set(8):
            fd = (radial_poly(idx, r + h) - radial_poly(idx, r - h)) / (2 * h)
            assert np.allclose(fd, radial_poly_derivative(idx, 1, r), rtol=1e-6, atol=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(indices, st.integers(1, 3))
    def test_derivative_bound(self, idx, k):
        r = np.linspace(0, 1, 401)
        bound = idx.m ** (2 * k)
        assert np.max(np.abs(radial_poly_derivative(idx, k, r))) <= bound * (1 + 1e-12) + 1e-12

    def test_order_cap(self):
        with pytest.raises(CapabilityError):
            radial_poly_derivative((0, 4), 9, 0.3)


class TestZernike:
    def test_piston(self):
        assert zernike_phi((0, 0), 0.3, 1.1) == 1 + 0j

    def test_tilt(self):
        assert zernike_phi((1, 1), 0.5, 0.0) == pytest.approx(math.sqrt(2) * 0.5)

    def test_astigmatism(self):
        assert zernike_phi((-2, 2), 1.0, math.pi / 2) == pytest.approx(-math.sqrt(3), abs=1e-14)

    def test_point_unpacking(self):
        p = BrainPoint(0.5, 0.0)
        assert zernike_phi((1, 1), *p) == pytest.approx(math.sqrt(2) * 0.5)

    def test_total_variant(self):
        assert zernike_phi((1, 2), 0.5, 0.1, strict=False) == 0
        with pytest.raises(DomainError):
            zernike_phi((1, 2), 0.5, 0.1)

    @settings(max_examples=40, deadline=None)
    @given(indices)
    def test_sup_bound(self, idx):
        r, t = np.meshgrid(np.linspace(0, 1, 60), np.linspace(0, 2 * np.pi, 30))
        assert np.max(np.abs(zernike_phi(idx, r, t))) <= math.sqrt(idx.m + 1) * (1 + 1e-12)


class TestChebyshev:
    def test_U0(self):
        assert chebyshev_U(0, 0.3) == 1.0

    def test_U1(self):
        assert chebyshev_U(1, 0.3) == pytest.approx(0.6)

    def test_U2(self):
        assert chebyshev_U(2, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_against_trig_form(self):
        theta = np.linspace(0.1, 3.0, 17)
        s = np.cos(theta)
        for m in range(30):
            assert np.allclose(chebyshev_U(m, s), np.sin((m + 1) * theta) / np.sin(theta), atol=1e-11)
            assert np.allclose(chebyshev_T(m, s), np.cos(m * theta), atol=1e-12)

    def test_derivative_of_constant(self):
        assert chebyshev_U_derivative(0, 1, 0.37) == 0.0

    def test_derivative_of_linear(self):
        assert chebyshev_U_derivative(1, 1, 0.37) == pytest.approx(2.0)

    def test_derivative_fd(self):
        h = 1e-6
        fd = (chebyshev_U(3, 0.2 + h) - chebyshev_U(3, 0.2 - h)) / (2 * h)
        assert chebyshev_U_derivative(3, 1, 0.2) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_derivative_fd_all(self, order):
        h = 1e-5
        s = np.linspace(0.05, 0.95, 11)
        for m in range(15):
            fd = (chebyshev_U_derivative(m, order - 1, s + h) - chebyshev_U_derivative(m, order - 1, s - h)) / (2 * h)
            ex = chebyshev_U_derivative(m, order, s)
            assert np.allclose(fd, ex, rtol=1e-6, atol=1e-6 * max(m, 1) ** (2 * order)), (m, order)

    @pytest.mark.parametrize("m", range(0, 21, 4))
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_derivative_bound(self, m, k):
        s = np.linspace(0, 1, 401)
        vals = chebyshev_U_derivative(m, k, s) if k else chebyshev_U(m, s)
        assert np.max(np.abs(vals)) <= (m + 1) * m ** (2 * k) + 1e-9


class TestPsi:
    def test_constant(self):
        assert psi((0, 0), 0.4, 2.0) == 1 + 0j

    def test_first(self):
        assert psi((1, 1), *DetectorPoint(0.5, 0.0)) == pytest.approx(1.0)

    def test_zero_of_U2(self):
        assert abs(psi((0, 2), 0.5, 1.234)) < 1e-15

    def test_total_variant(self):
        assert psi((0, 1), 0.5, 0.0, strict=False) == 0

    @settings(max_examples=40, deadline=None)
    @given(indices)
    def test_sup_bound(self, idx):
        s, p = np.meshgrid(np.linspace(0, 1, 80), np.linspace(0, 2 * np.pi, 20))
        assert np.max(np.abs(psi(idx, s, p))) <= idx.m + 1 + 1e-9
