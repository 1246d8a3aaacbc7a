"""
Test curvature energy module.
"""

import unittest

import numpy as np

from focflow.functionals.energy import (
    energy_F,
    energy_Ftilde,
    flow_velocity,
    grad_F,
    surface_gradient_oracle,
    trace_free_fraction,
)
from focflow.functionals.spec import FlowKind, FlowSpec, GeometryKind, IntegratorParams
from focflow.tensor.algebra import l2_inner
from focflow.tensor.grid import Grid2Chart, MetricField2


class TestCurvatureEnergy(unittest.TestCase):
    """Test F, its gradient and the flow velocities"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 24, 24)
        self.x, self.y = self.chart.coordinates()
        self.g = MetricField2(
            1.0 + 0.1 * np.sin(self.x),
            0.05 * np.cos(self.x + self.y),
            1.0 + 0.08 * np.sin(2 * self.y),
            self.chart,
        )

    def test_flat_energy_vanishes(self):
        """Flat metrics have zero energy"""
        self.assertLess(energy_F(MetricField2.identity(self.chart)), 1e-20)

    def test_first_variation(self):
        """dF(g + εh)/dε at 0 equals ⟨grad F, h⟩"""
        h = np.array([
            [np.cos(self.y), 0.5 * np.sin(self.x)],
            [0.5 * np.sin(self.x), np.cos(self.x - self.y)],
        ])
        eps = 1e-4
        numeric = (energy_F(self.g.plus(h, eps)) - energy_F(self.g.plus(h, -eps))) / (2 * eps)
        analytic = l2_inner(grad_F(self.g), h, self.g)
        self.assertAlmostEqual(analytic / numeric, 1.0, delta=1e-5)

    def test_surface_oracle(self):
        """On surfaces grad F equals 2∇²K − (2ΔK + K²)g"""
        gradient = grad_F(self.g).components
        oracle = surface_gradient_oracle(self.g).components
        scale = float(np.max(np.abs(oracle)))
        self.assertLess(float(np.max(np.abs(gradient - oracle))) / scale, 1e-6)

    def test_flipped_delta_breaks_oracle(self):
        """Flipping the δ term is visible against the oracle"""
        gradient = grad_F(self.g, delta_sign=-1.0).components
        oracle = surface_gradient_oracle(self.g).components
        scale = float(np.max(np.abs(oracle)))
        self.assertGreater(float(np.max(np.abs(gradient - oracle))) / scale, 1e-2)

    def test_scale_invariant_energy(self):
        """Vol·F is unchanged by constant rescaling on surfaces"""
        base = energy_Ftilde(self.g)
        self.assertAlmostEqual(energy_Ftilde(self.g.scaled(3.0)) / base, 1.0, places=10)
        self.assertAlmostEqual(energy_F(self.g.scaled(3.0)) * 3.0 / energy_F(self.g), 1.0, places=10)

    def test_velocity_is_negative_gradient(self):
        """L² flow velocity is −grad F"""
        spec = FlowSpec(FlowKind.L2_FLOW)
        velocity = flow_velocity(self.g, spec).components
        np.testing.assert_allclose(velocity, -grad_F(self.g).components, atol=1e-14)

    def test_calabi_velocity_refused(self):
        """Metric velocity is undefined for the Calabi flow"""
        with self.assertRaises(ValueError):
            flow_velocity(self.g, FlowSpec(FlowKind.SURFACE_CALABI))

    def test_trace_free_fraction(self):
        """Pure trace tensors have no trace-free part"""
        self.assertLess(trace_free_fraction(self.g.as_tensor(), self.g), 1e-12)


class TestFlowSpec(unittest.TestCase):
    """Test flow specifications"""

    def test_dimensions(self):
        """Each geometry reports its dimension"""
        self.assertEqual(FlowSpec(FlowKind.L2_FLOW).n, 2)
        self.assertEqual(FlowSpec(FlowKind.L2_FLOW, GeometryKind.PRODUCT_SPHERES).n, 4)
        self.assertEqual(FlowSpec(FlowKind.L2_FLOW, GeometryKind.MILNOR_FRAME).n, 3)

    def test_calabi_needs_grid(self):
        """Calabi flow is only defined on the torus grid"""
        with self.assertRaises(ValueError):
            FlowSpec(FlowKind.SURFACE_CALABI, GeometryKind.MILNOR_FRAME)

    def test_bad_params(self):
        """Invalid integrator parameters are rejected"""
        with self.assertRaises(ValueError):
            IntegratorParams(scheme="euler")
        with self.assertRaises(ValueError):
            IntegratorParams(tol=0.0)
        with self.assertRaises(ValueError):
            IntegratorParams(m_max=7)

    def test_with_params(self):
        """Parameter overrides return a new spec"""
        spec = FlowSpec(FlowKind.L2_FLOW).with_params(tol=1e-6)
        self.assertEqual(spec.params.tol, 1e-6)
        self.assertEqual(spec.kind, FlowKind.L2_FLOW)


if __name__ == '__main__':
    unittest.main()
