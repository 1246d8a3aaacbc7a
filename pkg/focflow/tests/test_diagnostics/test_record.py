"""
Test diagnostics record module.
"""

import unittest

import numpy as np

from focflow.diagnostics.record import build_record, record_columns
from focflow.functionals.energy import trace_free_fraction
from focflow.functionals.spec import FlowKind, FlowSpec, GeometryKind, IntegratorParams
from focflow.homogeneous.milnor import MilnorFrameMetric
from focflow.homogeneous.product_spheres import ProductSphereMetric
from focflow.tensor.grid import Grid2Chart, MetricField2, TensorField

GRID = FlowSpec(FlowKind.L2_FLOW, GeometryKind.TORUS_GRID, IntegratorParams(m_max=1))


class TestTraceFreeFraction(unittest.TestCase):
    """Test the recorded trace-free share of grad F"""

    def test_round_sphere_is_pure_trace(self):
        """grad F = −g on the round S³ has no trace-free part"""
        spec = FlowSpec(FlowKind.L2_FLOW, GeometryKind.MILNOR_FRAME)
        record = build_record(0.0, MilnorFrameMetric(1.0, 1.0, 1.0), spec)
        self.assertAlmostEqual(record.trace_free_fraction, 0.0, places=8)

    def test_unequal_spheres_are_pure_trace_free(self):
        """Opposite factors c·g1 ⊕ −c·g2 are entirely trace free"""
        spec = FlowSpec(FlowKind.L2_FLOW, GeometryKind.PRODUCT_SPHERES)
        record = build_record(0.0, ProductSphereMetric(1.0, 4.0), spec)
        self.assertAlmostEqual(record.trace_free_fraction, 1.0, places=8)

    def test_fraction_limits(self):
        """f·g is pure trace, a g-trace-free tensor is entirely trace free"""
        chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        x, y = chart.coordinates()
        g = MetricField2.conformal(0.1 * np.sin(x), chart)
        f = 1.0 + 0.5 * np.cos(y)
        self.assertAlmostEqual(trace_free_fraction(TensorField(f * g.components(), chart, 2), g), 0.0, places=12)
        zero = np.zeros(chart.shape)
        shear = np.array([[g.g11, zero], [zero, -g.g22]])
        self.assertAlmostEqual(trace_free_fraction(TensorField(shear, chart, 2), g), 1.0, places=12)
        self.assertEqual(trace_free_fraction(TensorField.zeros(chart, 2), g), 0.0)

    def test_conformal_bump_has_both_parts(self):
        """On a curved surface grad F carries trace and trace-free parts"""
        chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        x, y = chart.coordinates()
        g = MetricField2.conformal(0.1 * np.sin(x) * np.cos(y), chart)
        record = build_record(0.0, g, GRID)
        self.assertGreater(record.trace_free_fraction, 1e-3)
        self.assertLess(record.trace_free_fraction, 1.0)


class TestRecordColumns(unittest.TestCase):
    """Test the frozen CSV layout"""

    def test_trace_free_column(self):
        """The trace-free fraction has a column and lands in the row"""
        columns = record_columns(1)
        self.assertIn("trace_free_fraction", columns)
        self.assertLess(columns.index("symmetry_defect"), columns.index("trace_free_fraction"))
        spec = FlowSpec(FlowKind.L2_FLOW, GeometryKind.PRODUCT_SPHERES, IntegratorParams(m_max=1))
        row = build_record(0.0, ProductSphereMetric(1.0, 4.0), spec).to_row(1)
        self.assertEqual(list(row), record_columns(1, ("a2", "b2")))
        self.assertAlmostEqual(row["trace_free_fraction"], 1.0, places=8)


if __name__ == '__main__':
    unittest.main()
