"""
Test tensor calculus module.
"""

import unittest

import numpy as np

from focflow.curvature.bundle import gauss_curvature
from focflow.curvature.tensor_calculus import (
    christoffel,
    covariant_derivative,
    hessian,
    rough_laplacian,
)
from focflow.tensor.grid import Grid2Chart, MetricField2, TensorField
from focflow.tensor.spectral import flat_laplacian


class TestConnection(unittest.TestCase):
    """Test the Levi-Civita connection"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 32, 32)
        x, y = self.chart.coordinates()
        self.x, self.y = x, y
        self.g = MetricField2(
            1.3 + 0.2 * np.sin(x), 0.1 * np.sin(x + y), 1.1 + 0.15 * np.cos(y), self.chart
        )

    def test_flat_christoffel(self):
        """Constant metrics have zero connection"""
        gamma = christoffel(MetricField2.diagonal(2.0, 3.0, self.chart))
        self.assertLess(gamma.sup_abs(), 1e-12)

    def test_christoffel_symmetric(self):
        """Γ^k_ij is symmetric in its lower indices"""
        gamma = christoffel(self.g).components
        np.testing.assert_array_equal(gamma, np.swapaxes(gamma, 1, 2))

    def test_metric_is_parallel(self):
        """∇g vanishes"""
        nabla_g = covariant_derivative(self.g.as_tensor(), self.g)
        self.assertEqual(nabla_g.valence, 3)
        self.assertLess(nabla_g.sup_abs(), 1e-10)

    def test_conformal_laplacian(self):
        """On e^{2u}δ the Laplacian of a scalar is e^{-2u}Δ₀"""
        u = 0.1 * np.cos(self.x)
        g = MetricField2.conformal(u, self.chart)
        f = np.sin(self.x) * np.cos(2 * self.y)
        lap = rough_laplacian(TensorField.scalar(f, self.chart), g).components
        np.testing.assert_allclose(lap, np.exp(-2 * u) * flat_laplacian(f, self.chart), atol=1e-9)

    def test_hessian_symmetric(self):
        """Hessian of a scalar is symmetric"""
        f = TensorField.scalar(np.sin(self.x) * np.sin(self.y), self.chart)
        hess = hessian(f, self.g).components
        np.testing.assert_allclose(hess[0, 1], hess[1, 0], atol=1e-10)

    def test_conformal_christoffel(self):
        """On e^{2u}δ, Γ^k_ij = δ_ki u_j + δ_kj u_i − δ_ij u_k"""
        u = 0.2 * np.sin(self.x) * np.cos(self.y)
        du = np.array([0.2 * np.cos(self.x) * np.cos(self.y), -0.2 * np.sin(self.x) * np.sin(self.y)])
        delta = np.eye(2)
        expected = (
            np.einsum("ki,jXY->kijXY", delta, du)
            + np.einsum("kj,iXY->kijXY", delta, du)
            - np.einsum("ij,kXY->kijXY", delta, du)
        )
        gamma = christoffel(MetricField2.conformal(u, self.chart)).components
        np.testing.assert_allclose(gamma, expected, atol=1e-9)

    def test_ricci_identity(self):
        """Commuting two derivatives of a 1-form brings in K(g_ac ω_b − g_bc ω_a)"""
        omega = TensorField(np.array([np.sin(self.y), np.cos(self.x)]), self.chart, 1)
        D = covariant_derivative(covariant_derivative(omega, self.g), self.g).components
        lhs = D - np.swapaxes(D, 0, 1)
        K = gauss_curvature(self.g)
        gc = self.g.components()
        w = omega.components
        rhs = K * (np.einsum("acXY,bXY->abcXY", gc, w) - np.einsum("bcXY,aXY->abcXY", gc, w))
        np.testing.assert_allclose(lhs, rhs, atol=1e-8)

    def test_upper_tensor_refused(self):
        """Only all-lower tensors are differentiated"""
        with self.assertRaises(ValueError):
            covariant_derivative(christoffel(self.g), self.g)


if __name__ == '__main__':
    unittest.main()
