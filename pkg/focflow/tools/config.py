"""
Run configuration: a flat YAML mapping validated into a RunConfig.
"""

import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from ..constants import DEFAULT_DT0, DEFAULT_PERIOD, DEFAULT_TOLERANCE, DT_MAX, M_MAX
from ..functionals.spec import FlowKind, FlowSpec, GeometryKind, IntegratorParams
from ..utils.validators import ConfigError
from .presets import PRESETS

logger = logging.getLogger(__name__)

MONITOR_NAMES = (
    "smoothing",
    "sobolev",
    "equivalence",
    "ball_growth",
    "cutoff",
    "curvature_residual",
    "mode_decay",
    "singularity",
    "nonsingular",
)


@dataclass(frozen=True)
class RunConfig:
    kind: str = FlowKind.L2_FLOW.value
    geometry: str = GeometryKind.TORUS_GRID.value
    preset: str = "flat"
    amplitude: float = 0.1
    mode: int = 1
    seed: int = 0
    a2: float = 1.0
    b2: float = 4.0
    l1: float = 1.0
    l2: float = 1.0
    l3: float = 1.0
    N1: int = 32
    N2: int = 32
    L1: float = DEFAULT_PERIOD
    L2: float = DEFAULT_PERIOD
    t_end: float = 0.01
    tol: float = DEFAULT_TOLERANCE
    dt0: float = DEFAULT_DT0
    dt_max: float = DT_MAX
    scheme: str = "imex"
    dealias: bool = True
    m_max: int = 2
    snapshot_every: int = 10
    monitors: tuple = ()
    sobolev_radius: float = 0.5
    cutoff_radius: float = 0.5
    ball_radius: float = 0.5
    horizon: float = None
    out: str = "focflow-run"
    sweep: dict = field(default_factory=dict)

    @property
    def flow_kind(self):
        return FlowKind(self.kind)

    @property
    def geometry_kind(self):
        return GeometryKind(self.geometry)

    def to_spec(self):
        params = IntegratorParams(
            tol=self.tol,
            dt0=self.dt0,
            dt_max=self.dt_max,
            scheme=self.scheme,
            dealias=self.dealias,
            m_max=self.m_max,
        )
        return FlowSpec(self.flow_kind, self.geometry_kind, params)

    def with_overrides(self, **changes):
        changes = {key: value for key, value in changes.items() if value is not None}
        return validate_config(replace(self, **changes)) if changes else self

    def as_dict(self):
        data = asdict(self)
        data["monitors"] = list(self.monitors)
        return data


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_FLOAT_FIELDS = {name for name, kind in _FIELD_TYPES.items() if kind is float}
_INT_FIELDS = {name for name, kind in _FIELD_TYPES.items() if kind is int}


def _coerce(name, value, path):
    where = f"{path}.{name}"
    if name == "horizon" and value is None:
        return None
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(where, f"expected a number, got {value!r}")
        return float(value)
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(where, f"expected an integer, got {value!r}")
        return value
    if name == "dealias":
        if not isinstance(value, bool):
            raise ConfigError(where, f"expected true or false, got {value!r}")
        return value
    if name == "monitors":
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise ConfigError(where, "expected a list of monitor names")
        return tuple(str(v) for v in value)
    if name == "sweep":
        if not isinstance(value, dict):
            raise ConfigError(where, "expected a mapping of parameter to list of values")
        return dict(value)
    return str(value)


def validate_config(config, path="config"):
    def check(condition, name, message):
        if not condition:
            raise ConfigError(f"{path}.{name}", message)

    check(config.kind in {k.value for k in FlowKind}, "kind", f"unknown flow kind {config.kind!r}")
    check(
        config.geometry in {g.value for g in GeometryKind},
        "geometry",
        f"unknown geometry {config.geometry!r}",
    )
    check(config.preset in PRESETS, "preset", f"unknown preset {config.preset!r}")
    check(config.scheme in ("imex", "rk4"), "scheme", "must be 'imex' or 'rk4'")
    check(0 <= config.m_max <= M_MAX, "m_max", f"must lie in [0, {M_MAX}]")
    for name in ("t_end", "tol", "dt0", "dt_max", "L1", "L2"):
        check(getattr(config, name) > 0, name, "must be positive")
    for name in ("N1", "N2"):
        value = getattr(config, name)
        check(value >= 8 and value % 2 == 0, name, "must be even and at least 8")
    check(config.snapshot_every >= 1, "snapshot_every", "must be at least 1")
    for name in config.monitors:
        check(name in MONITOR_NAMES, "monitors", f"unknown monitor {name!r}")
    if config.kind == FlowKind.SURFACE_CALABI.value:
        check(config.geometry == GeometryKind.TORUS_GRID.value, "geometry", "SurfaceCalabi needs TorusGrid")
    for key, values in config.sweep.items():
        check(key in _FIELD_TYPES and key != "sweep", f"sweep.{key}", "not a configuration key")
        check(isinstance(values, list) and values, f"sweep.{key}", "expected a non-empty list")
    return config


def config_from_mapping(mapping, path="config"):
    if mapping is None:
        mapping = {}
    if not isinstance(mapping, dict):
        raise ConfigError(path, "the configuration must be a mapping")
    unknown = sorted(set(mapping) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown key")
    values = {name: _coerce(name, value, path) for name, value in mapping.items()}
    return validate_config(RunConfig(**values), path)


def load_config(filename):
    filename = Path(filename)
    try:
        with open(filename, "r", encoding="utf-8") as handle:
            mapping = yaml.safe_load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(str(filename), "file not found") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(str(filename), f"not valid YAML: {exc}") from exc
    logger.info("loaded configuration from %s", filename)
    return config_from_mapping(mapping)
