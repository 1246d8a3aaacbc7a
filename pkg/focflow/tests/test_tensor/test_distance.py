"""
Test graph distance module.
"""

import tempfile
import unittest
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from focflow.tensor.distance import (
    cutoff_function,
    distance_field,
    grid_distance,
    quintic_bump,
    systole_proxy,
)
from focflow.tensor.grid import Grid2Chart, MetricField2
from focflow.tensor.snapshot import read_snapshot, write_snapshot
from focflow.utils.validators import FlowLabError


class TestGridDistance(unittest.TestCase):
    """Test Dijkstra distances and cutoffs"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        self.flat = MetricField2.identity(self.chart)

    def test_axis_distance(self):
        """Four nodes along an axis are four spacings apart"""
        self.assertAlmostEqual(grid_distance(self.flat, (0, 0), (4, 0)), 4 * self.chart.h1)

    def test_diagonal_distance(self):
        """Diagonal edges have Euclidean length"""
        self.assertAlmostEqual(
            grid_distance(self.flat, (0, 0), (3, 3)), 3 * np.sqrt(2) * self.chart.h1
        )

    def test_distance_scales(self):
        """Scaling the metric by 4 doubles distances"""
        base = distance_field(self.flat, (2, 5))
        scaled = distance_field(self.flat.scaled(4.0), (2, 5))
        np.testing.assert_allclose(scaled, 2 * base, atol=1e-12)

    def test_flat_systole(self):
        """Shortest loop on the flat square torus has length 2π"""
        self.assertAlmostEqual(systole_proxy(self.flat), 2 * np.pi, places=10)

    def test_systole_through_odd_seam_node(self):
        """A short loop starting at any seam node is found"""
        chart = Grid2Chart(1.0, 1.0, 16, 16)
        for j in (1, 3):
            g11 = np.ones(chart.shape)
            g11[:, j] = 0.01
            g = MetricField2(g11, np.zeros(chart.shape), np.ones(chart.shape), chart)
            self.assertAlmostEqual(systole_proxy(g), 0.1, places=12)
        g22 = np.ones(chart.shape)
        g22[5, :] = 0.04
        g = MetricField2(np.ones(chart.shape), np.zeros(chart.shape), g22, chart)
        self.assertAlmostEqual(systole_proxy(g), 0.2, places=12)

    def test_triangle_inequality(self):
        """Graph distances obey the triangle inequality on a curved metric"""
        x, y = self.chart.coordinates()
        g = MetricField2.conformal(0.3 * np.sin(x) * np.cos(2 * y) + 0.2 * np.cos(x + y), self.chart)
        points = [(0, 0), (3, 11), (9, 4), (14, 14)]
        fields = {p: distance_field(g, p) for p in points}
        for p in points:
            for q in points:
                for r in points:
                    d_pr = fields[p][r]
                    d_pq_qr = fields[p][q] + fields[q][r]
                    self.assertLessEqual(d_pr, d_pq_qr + 1e-12)
        for p in points:
            for q in points:
                self.assertAlmostEqual(fields[p][q], fields[q][p], places=12)

    def test_one_dimensional_conformal_geodesic(self):
        """Along x, e^{2u(x)}δ distances converge to ∫ e^u dx"""
        chart = Grid2Chart(2 * np.pi, 2 * np.pi, 64, 16)
        x, _ = chart.coordinates()
        g = MetricField2.conformal(0.3 * np.sin(x), chart)
        exact, _ = quad(lambda s: np.exp(0.3 * np.sin(s)), 0.0, np.pi)
        measured = grid_distance(g, (0, 5), (32, 5))
        self.assertAlmostEqual(measured / exact, 1.0, delta=5e-3)

    def test_quintic_bump(self):
        """Bump is 1 inside, 0 outside and 1/2 halfway"""
        np.testing.assert_allclose(quintic_bump([0.0, 1.0, 1.5, 2.0, 3.0], 1.0), [1, 1, 0.5, 0, 0])

    def test_cutoff_profile(self):
        """Cutoff equals 1 at its center and vanishes far away"""
        cutoff = cutoff_function(self.flat, (0, 0), 0.5)
        self.assertEqual(cutoff.gamma[0, 0], 1.0)
        self.assertEqual(cutoff.gamma[8, 8], 0.0)
        self.assertEqual(cutoff.outer_radius, 1.0)


class TestSnapshot(unittest.TestCase):
    """Test binary metric snapshots"""

    def test_round_trip(self):
        """Written snapshot reads back bit for bit"""
        chart = Grid2Chart(2 * np.pi, 4.0, 8, 10)
        x, _ = chart.coordinates()
        g = MetricField2(1 + 0.3 * np.sin(x), 0.1 * np.cos(x), 2 + 0 * x, chart)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_snapshot(Path(tmp) / "g.focf", g)
            again = read_snapshot(path)
        self.assertEqual(again.chart, chart)
        np.testing.assert_array_equal(again.as_array(), g.as_array())

    def test_bad_magic(self):
        """Files without the magic header are refused"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "junk.focf"
            path.write_bytes(b"NOPE!" + bytes(64))
            with self.assertRaises(FlowLabError):
                read_snapshot(path)


if __name__ == '__main__':
    unittest.main()
