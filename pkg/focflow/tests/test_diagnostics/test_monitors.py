"""
Test smoothing monitors and control-lemma checks.
"""

import unittest

import numpy as np

from focflow.diagnostics.lemmas import (
    ball_growth_check,
    ball_radius_factor,
    cutoff_evolution_check,
    metric_equivalence_check,
    observed_speed,
)
from focflow.diagnostics.monitors import (
    curvature_evolution_residual,
    linearized_mode_decay,
    local_sobolev_monitor,
    smoothing_monitor,
)
from focflow.flow.integrator import run
from focflow.flow.trajectory import RescaleParams, parabolic_rescale, trajectory_from_states
from focflow.functionals.calabi import CalabiPotential
from focflow.functionals.spec import FlowKind, FlowSpec, GeometryKind, IntegratorParams
from focflow.homogeneous.milnor import MilnorFrameMetric
from focflow.tensor.distance import cutoff_function
from focflow.tensor.grid import Grid2Chart, MetricField2
from focflow.utils.validators import RangeEmpty, ValenceOverflow


def _grid_spec(kind=FlowKind.L2_FLOW, **params):
    params.setdefault("tol", 1e-6)
    params.setdefault("dt0", 1e-5)
    params.setdefault("dt_max", 1e-3)
    params.setdefault("m_max", 2)
    return FlowSpec(kind, GeometryKind.TORUS_GRID, IntegratorParams(**params))


class TestGridMonitors(unittest.TestCase):
    """Test monitors on a short conformal-bump run"""

    @classmethod
    def setUpClass(cls):
        chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        x, y = chart.coordinates()
        g = MetricField2.conformal(0.05 * np.sin(x) * np.cos(y), chart)
        cls.cutoff = cutoff_function(g, (4, 4), 0.8)
        cls.traj = run(g, _grid_spec(), 2e-3, cutoff=cls.cutoff)

    def test_smoothing_ratios_recorded(self):
        """Smoothing ratios are finite, positive and stored per record"""
        worst = smoothing_monitor(self.traj, 1)
        self.assertTrue(np.isfinite(worst))
        self.assertGreater(worst, 0.0)
        self.assertEqual(self.traj.records[0].smoothing_ratio[1], 0.0)
        self.assertIn(1, self.traj.records[-1].smoothing_ratio)

    def test_smoothing_rescaling_invariance(self):
        """Smoothing ratios survive the λ = 2 parabolic rescaling"""
        rescaled = parabolic_rescale(self.traj, RescaleParams(2.0, self.traj.t_start))
        for m in (1, 2):
            before, after = smoothing_monitor(self.traj, m), smoothing_monitor(rescaled, m)
            self.assertAlmostEqual(after / before, 1.0, delta=1e-6)

    def test_smoothing_order_limit(self):
        """Orders beyond the recorded derivatives are refused"""
        with self.assertRaises(ValenceOverflow):
            smoothing_monitor(self.traj, 3)

    def test_sobolev_normalization(self):
        """Normalized constant is the raw one over T^{m/2}"""
        estimate = local_sobolev_monitor(self.traj, (4, 4), 0.8, 1, sample_every=3)
        self.assertGreater(estimate.raw, 0.0)
        self.assertAlmostEqual(estimate.normalized, estimate.raw / np.sqrt(estimate.duration))

    def test_sobolev_rescaling_invariance(self):
        """Normalized constant survives parabolic rescaling"""
        base = local_sobolev_monitor(self.traj, (4, 4), 0.8, 1)
        rescaled = parabolic_rescale(self.traj, RescaleParams(2.0, 0.0))
        # distances scale by √λ
        again = local_sobolev_monitor(rescaled, (4, 4), 0.8 * np.sqrt(2.0), 1)
        self.assertAlmostEqual(again.normalized / base.normalized, 1.0, delta=1e-6)

    def test_equivalence(self):
        """Metrics stay within the observed-speed envelope, not a quarter of it"""
        self.assertTrue(metric_equivalence_check(self.traj, 0.0, self.traj.T).passed)
        self.assertTrue(metric_equivalence_check(self.traj, self.traj.T, self.traj.T).passed)
        with self.assertRaises(RangeEmpty):
            metric_equivalence_check(self.traj, 0.0, 2 * self.traj.T)

    def test_ball_growth(self):
        """Shrunken balls of one metric lie inside balls of the other"""
        result = ball_growth_check(self.traj, (0, 0), 1.0, self.traj.T)
        self.assertTrue(result.passed)
        self.assertLessEqual(result.detail["r_A"], 1.0)

    def test_ball_radius_above_systole(self):
        """Radii of half the systole or more are refused"""
        with self.assertRaises(ValueError):
            ball_growth_check(self.traj, (0, 0), 4.0, self.traj.T)

    def test_cutoff_evolution(self):
        """Cutoff derivatives obey the integrated bounds"""
        result = cutoff_evolution_check(self.traj, self.cutoff)
        self.assertTrue(result.passed)
        self.assertGreater(result.detail["L_observed"], 0.0)

    def test_curvature_residual_finite(self):
        """Curvature evolution residual is a finite non-negative number"""
        value = curvature_evolution_residual(self.traj)
        self.assertTrue(np.isfinite(value))
        self.assertGreaterEqual(value, 0.0)


class TestEquivalenceSensitivity(unittest.TestCase):
    """Test that a cut speed bound is caught on a grid run"""

    @classmethod
    def setUpClass(cls):
        chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        x, y = chart.coordinates()
        g = MetricField2.conformal(0.05 * np.sin(x) * np.sin(y), chart)
        cls.traj = run(g, _grid_spec(tol=1e-9, m_max=0), 2e-3)

    def test_observed_speed_passes(self):
        """The observed speed bounds the metric drift on every window"""
        for t in (0.25 * self.traj.T, self.traj.T):
            self.assertTrue(metric_equivalence_check(self.traj, 0.0, t).passed)

    def test_cut_speed_fails(self):
        """A cut speed cannot bound the drift, most clearly early on"""
        result = metric_equivalence_check(self.traj, 0.0, 0.25 * self.traj.T, a_scale=0.3)
        self.assertFalse(result.passed)
        self.assertLess(result.margin, -10 * result.detail["slack"])
        self.assertFalse(metric_equivalence_check(self.traj, 0.0, self.traj.T, a_scale=0.5).passed)


class TestModeDecay(unittest.TestCase):
    """Test decay of curvature modes near the flat metric"""

    def setUp(self):
        self.chart = Grid2Chart(2 * np.pi, 2 * np.pi, 16, 16)
        self.x, _ = self.chart.coordinates()

    def test_l2_flow_rate(self):
        """Mode |ξ| = 1 of K decays at rate |ξ|⁴"""
        g = MetricField2.conformal(1e-4 * np.cos(self.x), self.chart)
        traj = run(g, _grid_spec(tol=1e-8, dt_max=2e-3, m_max=0), 0.2)
        (decay,) = linearized_mode_decay(traj)
        self.assertEqual(decay.mode, (1, 0))
        self.assertAlmostEqual(decay.predicted_rate, 1.0)
        self.assertLess(decay.relative_error, 0.05)

    def test_calabi_rate(self):
        """Calabi flow halves the rate"""
        phi = CalabiPotential(1e-4 * np.cos(self.x), self.chart)
        traj = run(phi, _grid_spec(FlowKind.SURFACE_CALABI, tol=1e-8, dt_max=2e-3, m_max=0), 0.2)
        (decay,) = linearized_mode_decay(traj, modes=[(1, 0)])
        self.assertAlmostEqual(decay.predicted_rate, 0.5)
        self.assertLess(decay.relative_error, 0.05)


class TestHomogeneousChecks(unittest.TestCase):
    """Test lemma checks on the exact round-sphere path"""

    def setUp(self):
        times = [0.0, 0.1, 0.2, 0.3, 0.4]
        states = [MilnorFrameMetric(*([np.sqrt(1 + 2 * t)] * 3)) for t in times]
        spec = FlowSpec(FlowKind.L2_FLOW, GeometryKind.MILNOR_FRAME)
        self.traj = trajectory_from_states(times, states, spec)

    def test_observed_speed(self):
        """Largest |∂_t g| is taken at the start of the expanding path"""
        self.assertAlmostEqual(observed_speed(self.traj, 0.0, 0.4), np.sqrt(3.0))

    def test_equivalence_sensitivity(self):
        """Check passes with the observed speed and fails when it is cut too far"""
        self.assertTrue(metric_equivalence_check(self.traj, 0.0, 0.4).passed)
        self.assertFalse(metric_equivalence_check(self.traj, 0.0, 0.4, a_scale=0.3).passed)
        # log-eigenvalue extent ½ log 1.8 ≈ 0.294 against a bound 0.4·√3·0.4 ≈ 0.277
        self.assertFalse(metric_equivalence_check(self.traj, 0.0, 0.4, a_scale=0.4).passed)

    def test_grid_only_monitors(self):
        """Grid monitors refuse homogeneous trajectories"""
        with self.assertRaises(ValueError):
            linearized_mode_decay(self.traj)
        with self.assertRaises(ValueError):
            ball_growth_check(self.traj, (0, 0), 0.1, 0.4)

    def test_ball_radius_factor(self):
        """r_A is 1 at t = 0 and decreases"""
        self.assertEqual(ball_radius_factor(1.0, 0.0), 1.0)
        self.assertLess(ball_radius_factor(1.0, 0.5), ball_radius_factor(1.0, 0.1))


if __name__ == '__main__':
    unittest.main()
