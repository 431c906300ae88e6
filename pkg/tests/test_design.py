import math

import numpy as np
import pytest
from scipy import integrate

from radon_spectral.design import (
    CSV_HEADER,
    DesignGrid,
    GridCell,
    build_grid,
    cell_weight,
    grid_from_arrays,
    radial_design_point,
)
from radon_spectral.errors import DomainError, UsageError
from radon_spectral.files import read_table


def moment_residual(lo, hi, z):
    val, _ = integrate.quad(lambda s: (s - z) * math.sqrt(1 - s * s), lo, hi, epsabs=1e-15, epsrel=1e-14)
    return val


class TestRadialDesignPoint:
    def test_full_interval(self):
        assert radial_design_point(0.0, 1.0) == pytest.approx(4 / (3 * math.pi), abs=1e-12)

    @pytest.mark.parametrize("s0", [0.0, 0.3, 0.7, 0.99])
    def test_narrow_cell_is_midpoint(self, s0):
        eps = 1e-4
        # second-order shift of size eps^2 s / (12 (1 - s^2))
        tol = eps**2 / (1 - (s0 + eps) ** 2)
        assert radial_design_point(s0, s0 + eps) == pytest.approx(s0 + eps / 2, abs=tol)

    @pytest.mark.parametrize("lo,hi", [(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0), (0.999, 1.0),
                                       (0.1, 0.1001)])
    def test_moment_vanishes(self, lo, hi):
        z = radial_design_point(lo, hi)
        assert lo < z < hi
        assert abs(moment_residual(lo, hi, z)) <= 1e-12

    def test_below_midpoint(self):
        # the weight decreases in s, pulling the balance point left
        lo = np.linspace(0, 0.9, 10)
        z = radial_design_point(lo, lo + 0.1)
        assert np.all(z < lo + 0.05)

    def test_vectorized_matches_scalar(self):
        lo = np.array([0.0, 0.2, 0.6])
        hi = np.array([0.2, 0.6, 1.0])
        z = radial_design_point(lo, hi)
        assert [radial_design_point(a, b) for a, b in zip(lo, hi)] == list(z)

    @pytest.mark.parametrize("lo,hi", [(0.5, 0.5), (0.6, 0.4), (-0.1, 0.2), (0.2, 1.1)])
    def test_bad_bounds(self, lo, hi):
        with pytest.raises(DomainError):
            radial_design_point(lo, hi)


class TestBuildGrid:
    def test_single_cell(self):
        g = build_grid(1)
        assert (g.q, g.p, g.n) == (1, 6, 6)
        g = build_grid(1, ratio=1.0)
        assert g.n == 1
        assert g.s[0] == pytest.approx(4 / (3 * math.pi), abs=1e-12)
        assert g.phi[0] == pytest.approx(math.pi)
        assert g.weights[0] == pytest.approx(1.0, abs=1e-14)

    def test_q8(self):
        g = build_grid(8)
        assert (g.p, g.n) == (50, 400)
        assert g.weights.sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("ratio", [1.0, 2 * math.pi])
    @pytest.mark.parametrize("q", list(range(1, 65)))
    def test_invariants(self, q, ratio):
        g = build_grid(q, ratio)
        assert g.p == round(ratio * q)
        assert abs(g.weights.sum() - 1.0) <= 1e-12
        assert np.all(g.weights > 0)
        assert g.weights.max() <= 4 / (math.pi * g.n) * (1 + 1e-12)
        k1 = np.arange(q)
        assert np.all((g.s_col > k1 / q) & (g.s_col < (k1 + 1) / q))
        k2 = np.arange(g.p)
        assert np.all((g.phi_row >= 2 * math.pi * k2 / g.p) & (g.phi_row <= 2 * math.pi * (k2 + 1) / g.p))

    def test_monotone(self):
        g = build_grid(16)
        assert np.all(np.diff(g.s_col) > 0)
        assert np.all(np.diff(g.phi_row) > 0)
        assert np.all(np.diff(g.column_weights[:, 0]) < 0)

    def test_row_major_layout(self):
        g = build_grid(3, ratio=2.0)
        assert g.index(2, 5) == 17
        assert g.s[g.index(1, 4)] == g.s_col[1]
        assert g.phi[g.index(1, 4)] == g.phi_row[4]

    def test_cell_weight_matches_grid(self):
        g = build_grid(5)
        for k1 in range(5):
            assert cell_weight(g.cell(k1, 3)) == pytest.approx(g.weights[g.index(k1, 3)], rel=1e-14)

    def test_cell_weight_quadrature(self):
        cell = GridCell.at(2, 1, 4, 7)
        mass, _ = integrate.quad(lambda s: math.sqrt(1 - s * s), cell.s_lo, cell.s_hi)
        expected = 2 / math.pi**2 * (cell.phi_hi - cell.phi_lo) * mass
        assert cell_weight(cell) == pytest.approx(expected, rel=1e-13)

    def test_immutable(self):
        g = build_grid(2)
        with pytest.raises(ValueError):
            g.weights[0] = 1.0

    @pytest.mark.parametrize("q,ratio", [(0, 1.0), (-1, 1.0), (2, 0.1)])
    def test_bad_sizes(self, q, ratio):
        with pytest.raises(DomainError):
            build_grid(q, ratio)

    def test_shape_checks(self):
        with pytest.raises(UsageError):
            DesignGrid(2, 2, np.zeros(3), np.zeros(2), np.zeros(4))


class TestCSV:
    def test_round_trip(self, tmp_path):
        g = build_grid(4)
        path = tmp_path / "grid.csv"
        path.write_text(g.to_csv())
        assert path.read_text().splitlines()[0] == CSV_HEADER
        cols = read_table(path)
        assert list(cols) == ["k1", "k2", "s", "phi", "weight"]
        back = grid_from_arrays(cols["k1"], cols["k2"], cols["s"], cols["phi"], cols["weight"])
        assert (back.q, back.p) == (g.q, g.p)
        assert np.array_equal(back.s_col, g.s_col)
        assert np.array_equal(back.phi_row, g.phi_row)
        assert np.array_equal(back.weights, g.weights)

    def test_incomplete_grid_rejected(self):
        with pytest.raises(UsageError):
            grid_from_arrays([0, 0, 1], [0, 1, 0], [0.1] * 3, [0.1] * 3, [1 / 3] * 3)
