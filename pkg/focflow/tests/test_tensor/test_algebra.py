"""
Test tensor algebra module.
"""

import unittest

import numpy as np

from focflow.tensor.algebra import (
    contract_norm_sq,
    eigenvalue_bounds,
    integrate,
    l2_inner,
    metric_inverse,
    relative_log_eigenvalues,
    volume,
)
from focflow.tensor.grid import Grid2Chart, MetricField2, TensorField


class TestMetricAlgebra(unittest.TestCase):
    """Test pointwise algebra and integrals"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        x, y = self.chart.coordinates()
        self.g = MetricField2(
            1.5 + 0.2 * np.sin(x), 0.1 * np.cos(y), 1.2 + 0.1 * np.cos(x + y), self.chart
        )

    def test_volume_of_flat_torus(self):
        """Flat torus of period 2π has area 4π²"""
        flat = MetricField2.identity(self.chart)
        self.assertAlmostEqual(volume(flat), 4 * np.pi**2, places=10)
        self.assertAlmostEqual(integrate(np.ones(self.chart.shape), flat.scaled(4.0)), 16 * np.pi**2, places=9)

    def test_inverse(self):
        """g times its inverse is the identity at every node"""
        product = np.einsum("abXY,bcXY->acXY", self.g.components(), metric_inverse(self.g).components)
        np.testing.assert_allclose(product[0, 0], 1.0, atol=1e-13)
        np.testing.assert_allclose(product[0, 1], 0.0, atol=1e-13)

    def test_norm_of_metric(self):
        """|g|²_g equals the dimension"""
        np.testing.assert_allclose(contract_norm_sq(self.g.as_tensor(), self.g), 2.0, atol=1e-12)

    def test_l2_inner_of_metric(self):
        """⟨g, g⟩ integrates to twice the volume"""
        tensor = self.g.as_tensor()
        self.assertAlmostEqual(l2_inner(tensor, tensor, self.g), 2 * volume(self.g), places=9)

    def test_eigenvalue_bounds(self):
        """Diagonal metric has its entries as eigenvalues"""
        low, high = eigenvalue_bounds(MetricField2.diagonal(2.0, 5.0, self.chart))
        np.testing.assert_allclose(low, 2.0)
        np.testing.assert_allclose(high, 5.0)

    def test_relative_log_eigenvalues(self):
        """Scaling by 4 shifts both log eigenvalues by log 4"""
        low, high = relative_log_eigenvalues(self.g, self.g.scaled(4.0))
        np.testing.assert_allclose(low, np.log(4.0), atol=1e-12)
        np.testing.assert_allclose(high, np.log(4.0), atol=1e-12)

    def test_translation_invariance(self):
        """Rolling the grid moves pointwise norms and leaves integrals fixed"""
        shift = (3, 5)
        moved = self.g.translated(shift)
        x, y = self.chart.coordinates()
        T = TensorField(np.array([[np.sin(x), np.cos(y)], [x * 0, np.sin(x + y)]]), self.chart, 2)
        np.testing.assert_allclose(
            contract_norm_sq(T.translated(shift), moved),
            np.roll(contract_norm_sq(T, self.g), shift, axis=(0, 1)),
            atol=1e-13,
        )
        self.assertAlmostEqual(integrate(1.0, moved), integrate(1.0, self.g), places=11)

    def test_integrate_rejects_other_chart(self):
        """Fields on another chart cannot be integrated"""
        other = Grid2Chart(2 * np.pi, 2 * np.pi, 8, 8)
        with self.assertRaises(ValueError):
            integrate(TensorField.zeros(other, 0), self.g)


if __name__ == '__main__':
    unittest.main()
