"""
Named initial data for runs and sweeps.
"""

import logging

import numpy as np

from ..functionals.calabi import CalabiPotential
from ..functionals.spec import FlowKind, GeometryKind
from ..homogeneous.milnor import MilnorFrameMetric
from ..homogeneous.product_spheres import ProductSphereMetric
from ..tensor.grid import Grid2Chart, MetricField2
from ..tensor.spectral import random_smooth_field
from ..utils.validators import ConfigError, FlowLabError

logger = logging.getLogger(__name__)

LOWEST_MODES = ((1, 0), (0, 1), (1, 1))


def chart_of(config):
    return Grid2Chart(config.L1, config.L2, config.N1, config.N2)


def _phase(chart, p, q):
    x, y = chart.coordinates()
    return 2 * np.pi * (p * x / chart.L1 + q * y / chart.L2)


def flat(config):
    chart = chart_of(config)
    if config.kind == FlowKind.SURFACE_CALABI.value:
        return CalabiPotential.zero(chart)
    return MetricField2.identity(chart)


def conformal_bump(config):
    """e^{2u}δ with u = amplitude·sin(mode·x)·sin(mode·y) on the period-normalized chart."""
    chart = chart_of(config)
    x, y = chart.coordinates()
    u = (
        config.amplitude
        * np.sin(2 * np.pi * config.mode * x / chart.L1)
        * np.sin(2 * np.pi * config.mode * y / chart.L2)
    )
    return MetricField2.conformal(u, chart)


def random_smooth(config):
    """δ plus a seeded band-limited symmetric perturbation of sup-size ``amplitude``."""
    chart = chart_of(config)
    rng = np.random.default_rng(config.seed)
    h11, h12, h22 = (random_smooth_field(chart, rng, config.amplitude) for _ in range(3))
    return MetricField2(1.0 + h11, 0.5 * h12, 1.0 + h22, chart)


def lowest_modes(config):
    """Conformal perturbation carrying the three lowest nonzero Fourier modes."""
    chart = chart_of(config)
    u = sum(np.cos(_phase(chart, p, q)) for p, q in LOWEST_MODES)
    return MetricField2.conformal(config.amplitude * u, chart)


def calabi_random(config):
    chart = chart_of(config)
    rng = np.random.default_rng(config.seed)
    return CalabiPotential(random_smooth_field(chart, rng, config.amplitude), chart)


def product_spheres(config):
    return ProductSphereMetric(config.a2, config.b2)


def milnor(config):
    return MilnorFrameMetric(config.l1, config.l2, config.l3)


PRESETS = {
    "flat": flat,
    "conformal-bump": conformal_bump,
    "random-smooth": random_smooth,
    "modes": lowest_modes,
    "calabi-random": calabi_random,
    "product-spheres": product_spheres,
    "milnor": milnor,
}

PRESET_GEOMETRY = {
    "product-spheres": GeometryKind.PRODUCT_SPHERES.value,
    "milnor": GeometryKind.MILNOR_FRAME.value,
}


def build_initial_state(config):
    """Build and validate the preset's initial state; failures become ConfigError."""
    geometry = PRESET_GEOMETRY.get(config.preset, GeometryKind.TORUS_GRID.value)
    if geometry != config.geometry:
        raise ConfigError("config.preset", f"{config.preset!r} does not live on {config.geometry}")
    calabi = config.kind == FlowKind.SURFACE_CALABI.value
    if calabi and config.preset not in ("flat", "calabi-random"):
        raise ConfigError("config.preset", "SurfaceCalabi starts from 'flat' or 'calabi-random'")
    if config.preset == "calabi-random" and not calabi:
        raise ConfigError("config.kind", "'calabi-random' initial data needs kind SurfaceCalabi")
    try:
        state = PRESETS[config.preset](config)
    except FlowLabError as exc:
        raise ConfigError("config.amplitude", f"initial data is not admissible: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config.{config.preset}", str(exc)) from exc
    logger.info("built initial data %r", config.preset)
    return state
