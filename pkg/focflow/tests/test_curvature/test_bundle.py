"""
Test curvature bundle module.
"""

import unittest
import warnings

import numpy as np

from focflow.curvature.bundle import (
    curvature_bundle,
    derivative_norms,
    f_m,
    first_bianchi_defect,
    gauss_curvature,
    riemann,
)
from focflow.tensor.algebra import integrate
from focflow.tensor.grid import Grid2Chart, MetricField2
from focflow.tensor.spectral import flat_laplacian
from focflow.utils.validators import SymmetryDefect, ValenceOverflow


class TestSurfaceCurvature(unittest.TestCase):
    """Test curvature of conformal metrics on the torus"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 32, 32)
        x, y = self.chart.coordinates()
        self.u = 0.1 * np.sin(x) * np.cos(y)
        self.g = MetricField2.conformal(self.u, self.chart)
        self.K = -np.exp(-2 * self.u) * flat_laplacian(self.u, self.chart)

    def test_gauss_curvature_formula(self):
        """K of e^{2u}δ is -e^{-2u}Δu"""
        np.testing.assert_allclose(gauss_curvature(self.g), self.K, atol=1e-8)

    def test_gauss_bonnet(self):
        """Total curvature of a torus vanishes"""
        total = integrate(gauss_curvature(self.g), self.g)
        self.assertLess(abs(total), 1e-9)

    def test_riemann_layout(self):
        """R_1221 equals K det g and R_1212 its negative"""
        b = riemann(self.g)
        np.testing.assert_allclose(b.rm.components[0, 1, 1, 0], self.K * self.g.det(), atol=1e-8)
        np.testing.assert_allclose(b.rm.components[0, 1, 0, 1], -self.K * self.g.det(), atol=1e-8)

    def test_ricci_and_norm(self):
        """On a surface Rc = K g and |Rm|² = 4K²"""
        b = riemann(self.g)
        np.testing.assert_allclose(b.rc.components, self.K * self.g.components(), atol=1e-8)
        np.testing.assert_allclose(b.norm_rm_sq, 4 * self.K**2, atol=1e-8)
        self.assertLess(b.symmetry_defect, 1e-6)

    def test_rcheck_is_half_norm_times_metric(self):
        """Ř = 2K² g on a surface"""
        b = curvature_bundle(self.g, m_max=1)
        np.testing.assert_allclose(b.rcheck.components, 2 * self.K**2 * self.g.components(), atol=1e-8)

    def test_first_bianchi(self):
        """Symmetrized Riemann satisfies the first Bianchi identity"""
        self.assertLess(first_bianchi_defect(riemann(self.g).rm), 1e-10)

    def test_scaling(self):
        """Scaling the metric by c divides K by c"""
        np.testing.assert_allclose(gauss_curvature(self.g.scaled(4.0)), self.K / 4.0, atol=1e-8)

    def test_flat_torus(self):
        """Flat metric has vanishing curvature and derivative norms"""
        flat = MetricField2.identity(self.chart, scale=2.0)
        b = curvature_bundle(flat, m_max=2)
        self.assertLess(b.sup_rm, 1e-10)
        self.assertEqual(len(b.deriv_sup), 3)
        self.assertLess(max(b.deriv_sup), 1e-10)
        _, sup = f_m(flat, 2, b)
        self.assertLess(sup, 1e-6)

    def test_derivative_norm_invariance(self):
        """|∇Rm| is unchanged by a grid translation up to the same shift"""
        norms = derivative_norms(self.g, 1)
        shifted = derivative_norms(self.g.translated((3, 5)), 1)
        np.testing.assert_allclose(shifted[1], np.roll(norms[1], (3, 5), axis=(0, 1)), atol=1e-10)

    def test_derivative_norm_scaling(self):
        """|∇ᵏRm|_{cg} = c^{-(1+k/2)}|∇ᵏRm|_g and f_m(cg) = f_m(g)/c"""
        c = 4.0
        norms = derivative_norms(self.g, 2)
        scaled = derivative_norms(self.g.scaled(c), 2)
        for k in range(3):
            np.testing.assert_allclose(scaled[k], c ** -(1 + k / 2) * norms[k], rtol=1e-10, atol=1e-14)
        values, sup = f_m(self.g, 2)
        assembled = norms[1] ** (2 / 3) + norms[2] ** (2 / 4)
        np.testing.assert_allclose(values, assembled, rtol=1e-12)
        scaled_values, scaled_sup = f_m(self.g.scaled(c), 2)
        np.testing.assert_allclose(scaled_values, values / c, rtol=1e-10, atol=1e-14)
        self.assertAlmostEqual(scaled_sup, sup / c, places=10)

    def test_symmetry_defect_measures_projection(self):
        """The recorded defect is the relative size of the symmetrizing correction"""
        x, y = self.chart.coordinates()
        g = MetricField2(1.0 + 1e-3 * np.sin(x), 1e-3 * np.cos(y), 1.0 + 1e-3 * np.cos(x + y), self.chart)
        raw = riemann(g, symmetrize=False).rm.components
        b = riemann(g)
        expected = np.linalg.norm(raw - b.rm.components) / np.linalg.norm(raw)
        self.assertAlmostEqual(b.symmetry_defect, expected, places=12)
        self.assertLess(b.symmetry_defect, 1e-6)

    def test_flat_metric_has_no_defect(self):
        """Round-off on a flat metric is not reported as a symmetry defect"""
        flat = MetricField2(
            np.full(self.chart.shape, 2.0), np.full(self.chart.shape, 0.3), np.ones(self.chart.shape), self.chart
        )
        with warnings.catch_warnings():
            warnings.simplefilter("error", SymmetryDefect)
            b = riemann(flat)
        self.assertEqual(b.symmetry_defect, 0.0)

    def test_valence_overflow(self):
        """Orders beyond the supported maximum are refused"""
        with self.assertRaises(ValenceOverflow):
            derivative_norms(self.g, 5)
        with self.assertRaises(ValenceOverflow):
            f_m(self.g, 5)


if __name__ == '__main__':
    unittest.main()
