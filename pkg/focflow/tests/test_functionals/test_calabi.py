"""
Test Calabi potential module.
"""

import unittest

import numpy as np

from focflow.curvature.bundle import riemann
from focflow.functionals.calabi import (
    CalabiPotential,
    calabi_dissipation,
    calabi_energy,
    calabi_scalar_curvature,
    calabi_velocity,
)
from focflow.tensor.algebra import integrate
from focflow.tensor.grid import Grid2Chart
from focflow.utils.validators import PotentialDegenerate


class TestCalabiPotential(unittest.TestCase):
    """Test the Calabi flow in potential form"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 32, 32)
        x, y = self.chart.coordinates()
        self.phi = CalabiPotential(0.1 * np.sin(x) * np.cos(y) + 0.05 * np.cos(2 * y), self.chart)

    def test_zero_potential_is_stationary(self):
        """Flat metric does not move"""
        velocity = calabi_velocity(CalabiPotential.zero(self.chart))
        self.assertLess(float(np.max(np.abs(velocity))), 1e-12)

    def test_degenerate_potential(self):
        """Potentials with 1 + ½Δ₀φ <= 0 are refused"""
        x, _ = self.chart.coordinates()
        with self.assertRaises(PotentialDegenerate) as ctx:
            CalabiPotential(4.0 * np.sin(x), self.chart)
        self.assertLessEqual(ctx.exception.value, 0.0)

    def test_scalar_curvature_matches_metric(self):
        """s of the potential equals twice the Gauss curvature of h·δ"""
        s = calabi_scalar_curvature(self.phi)
        np.testing.assert_allclose(s, riemann(self.phi.metric()).s, atol=1e-9)

    def test_velocity_has_zero_mean(self):
        """s − s̄ integrates to zero"""
        g = self.phi.metric()
        self.assertLess(abs(integrate(calabi_velocity(self.phi), g)), 1e-12)

    def test_dissipation_matches_energy_decay(self):
        """−d/dt ∫s² dV agrees with a centered difference along the flow"""
        velocity = calabi_velocity(self.phi)
        dt = 1e-5
        ahead = CalabiPotential(self.phi.phi + dt * velocity, self.chart)
        behind = CalabiPotential(self.phi.phi - dt * velocity, self.chart)
        rate = (calabi_energy(ahead) - calabi_energy(behind)) / (2 * dt)
        dissipation = calabi_dissipation(self.phi)
        self.assertGreater(dissipation, 0.0)
        self.assertAlmostEqual(-rate / dissipation, 1.0, delta=1e-4)

    def test_linearization(self):
        """φ = ε sin(kx) moves with −½εk⁴ sin(kx) up to O(ε²)"""
        chart = Grid2Chart(4.0, 2 * np.pi, 32, 8)
        x, _ = chart.coordinates()
        k = 2 * np.pi / chart.L1

        def remainder(eps):
            mode = eps * np.sin(k * x)
            velocity = calabi_velocity(CalabiPotential(mode, chart))
            return float(np.max(np.abs(velocity + 0.5 * k**4 * mode)))

        coarse, fine = remainder(1e-4), remainder(1e-5)
        self.assertLess(coarse, 1e-2 * 0.5 * k**4 * 1e-4)
        self.assertLess(fine, coarse / 50)


if __name__ == '__main__':
    unittest.main()
